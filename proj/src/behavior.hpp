#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "config.hpp"
#include "kinematics.hpp"
#include "scene.hpp"

namespace kinpred {

/// Mean and covariance of a Gaussian belief over a state/parameter vector.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Car-following hypothesis: desired-gap/desired-speed control toward a lead
/// vehicle (or free driving when leader is empty).
struct LongitudinalModel {
  std::optional<int> leader;
  int horizon_kc = 100;
  double sigma_g = 2.0;
  double sigma_v = 2.0;
  double sigma_lon = 0.05;
};

/// Lane-change hypothesis: merge toward lane_center completing merge_steps
/// after the window start, then lane keeping over keep_horizon_ks.
struct LateralModel {
  double lane_center = 0.0;
  int merge_steps = 0;
  int keep_horizon_ks = 100;
  double sigma_p = 1.5;
  double sigma_lat = 0.05;
};

/// Time-varying linear-Gaussian system over the augmented state
/// (kinematic state + unknown constant parameters), covering the
/// observation window t = 1..length:
///   z(t+1) = F[t-1] z(t) + c[t-1] + w,  w ~ N(0, Q)
///   y(t)   = H z(t) + r,               r ~ N(0, R)
/// Longitudinal: z = (p1, v1, g*, v*); lateral: z = (p2, v2, p_m).
/// Parameter rows of every F are identity (the parameters are constants).
struct AugmentedSystem {
  int dim = 0;
  int length = 0;
  std::vector<Eigen::MatrixXd> F;  ///< length-1 transitions
  std::vector<Eigen::VectorXd> c;  ///< exogenous offsets (leader-dependent)
  Eigen::MatrixXd Q;
  Eigen::RowVectorXd H;
  double R = 0.0;                  ///< observation-noise variance
  GaussianBelief prior;            ///< belief at t = 1
};

/// First input of the minimum-norm follow control: steer toward the point a
/// desired gap behind where the leader would be after kc constant-speed
/// steps, arriving at the desired speed.
double lon_control(const AxisState& state, double g_star, double v_star,
                   const AxisState& leader, int kc, const GainTable& gains);

/// Free-driving control (v_star - velocity) / kf.
double lon_control_no_lead(double velocity, double v_star, int kf);

/// Controller horizon at elapsed time t of a merge with k steps remaining at
/// t = 0: the countdown k - t while it exceeds 2, the lane-keep horizon ks
/// afterwards.
int lat_horizon(int k, int t, int ks);

/// First input of the minimum-norm merge control toward (p_m, 0) over
/// lat_horizon(k, t, ks).
double lat_control(const AxisState& state, double p_m, int k, int t, int ks,
                   const GainTable& gains);

/// Lateral control used inside rollouts and system construction. Follows the
/// merge countdown all the way to completion so a noiseless merge ends
/// exactly at (p_m, 0) after k steps: horizon k-t while k-t >= 2, a
/// velocity-zeroing step at k-t == 1, lane keeping with horizon ks once the
/// merge is over.
double lat_rollout_control(const AxisState& state, double p_m, int k,
                           int elapsed, int ks, const GainTable& gains);

/// Coefficients (a_p, a_v, a_pm) of lat_rollout_control as a linear function
/// of the augmented lateral state.
Eigen::RowVector3d lat_control_coeffs(int k, int elapsed, int ks,
                                      const GainTable& gains);

/// Parameter prior means anchored at the end of the observation window.
struct ParamPriors {
  std::optional<double> gap_mean;  ///< g* mean; empty for free driving
  double speed_mean = 0.0;         ///< v* mean
  double lane_center = 0.0;        ///< p_m mean
};

/// gap mean = leader longitudinal position at n minus the target's last
/// observed longitudinal position; speed mean from a finite difference of the
/// target's last two observed positions; p_m mean = lane center.
/// leader_at_n carries the (possibly smoothed) leader state at t = n.
ParamPriors priors_from_observations(const Scene& scene, double lane_center,
                                     const std::optional<AxisState>& leader_at_n);

/// Initial beliefs at t = 1, anchored on the first observations.
GaussianBelief initial_lon_belief(const Scene& scene, const ParamPriors& priors,
                                  const LongitudinalModel& model,
                                  const RunConfig& cfg);
GaussianBelief initial_lat_belief(const Scene& scene, const ParamPriors& priors,
                                  const LateralModel& model,
                                  const RunConfig& cfg);

/// 4-dimensional system (p1, v1, g*, v*). leader_track holds the smoothed
/// leader states for t = 1..n and must be non-null iff model.leader is set;
/// without a leader the g* row is inert and the free-driving law applies.
AugmentedSystem build_lon_system(const LongitudinalModel& model,
                                 const std::vector<AxisState>* leader_track,
                                 const GaussianBelief& prior, double obs_noise_var,
                                 const GainTable& gains, int n);

/// 3-dimensional system (p2, v2, p_m) with the merge countdown embedded in
/// the per-step transitions.
AugmentedSystem build_lat_system(const LateralModel& model,
                                 const GaussianBelief& prior, double obs_noise_var,
                                 const GainTable& gains, int n);

/// Noiseless rollout of an augmented system from state z1 at t = 1;
/// returns `length` states including z1.
std::vector<Eigen::VectorXd> simulate_noiseless(const AugmentedSystem& sys,
                                                const Eigen::VectorXd& z1);

}  // namespace kinpred
