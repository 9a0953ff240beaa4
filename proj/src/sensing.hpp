#pragma once

#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "kinematics.hpp"
#include "scene.hpp"

namespace kinpred {

/// True iff the segment ego->subject passes within `radius` of any obstacle
/// center. Obstacles must exclude the two endpoints themselves.
bool occluded(const Eigen::Vector2d& ego, const Eigen::Vector2d& subject,
              const std::vector<Eigen::Vector2d>& obstacles, double radius);

/// Degrades the masks of every track other than `ego_id` as seen from the
/// ego vehicle: per timestep a vehicle is observed iff its longitudinal
/// offset from the ego is within range_lon and the line of sight is clear.
/// Tracks visible for less than min_obs_s in total are removed outright.
Scene driver_view(const Scene& scene, int ego_id, const SensorConfig& config);

/// Fixed-interval smoothing of one axis under the constant-velocity motion
/// model: forward Kalman pass over the observed samples, backward smoothing
/// pass, yielding a position/velocity estimate at every window timestep
/// including unobserved ones. Needs at least one observed sample.
std::vector<AxisState> smooth_track_cv(const std::vector<double>& positions,
                                       const std::vector<bool>& mask, double dt,
                                       double sigma_process, double sigma_obs);

/// Smoothed longitudinal states of a surrounding track over t = 1..n.
std::vector<AxisState> smooth_longitudinal(const Track& track, int n, double dt,
                                           double sigma_process, double sigma_obs);

}  // namespace kinpred
