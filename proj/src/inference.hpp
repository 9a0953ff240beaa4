#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "behavior.hpp"
#include "config.hpp"
#include "kinematics.hpp"
#include "rng.hpp"
#include "scene.hpp"

namespace kinpred {

/// Posterior at the end of the window plus the accumulated evidence.
struct FilterResult {
  GaussianBelief posterior;
  double log_marginal = 0.0;
};

/// Standard predict/update recursion over the window t = 1..length.
/// Timesteps outside the mask run predict only; the prior already describes
/// t = 1, so no predict happens before the first update. log_marginal is the
/// sum of log innovation densities over the observed timesteps.
/// Throws NumericError when the covariance stops being PSD.
FilterResult kalman_filter(const AugmentedSystem& sys,
                           const std::vector<double>& observations,
                           const std::vector<bool>& mask);

/// Softmax over log marginals, computed in log space (subtract max before
/// exponentiating). Throws when the list is empty or no entry is finite.
std::vector<double> component_weights(const std::vector<double>& log_marginals);

/// One behavior hypothesis (lane, leader, merge duration) together with its
/// filtering results.
struct ComponentModel {
  CandidatePair pair;
  int merge_steps = 0;
  double k_seconds = 0.0;
  std::optional<AxisState> leader_at_n;  ///< smoothed leader state at t = n
  GaussianBelief lon_posterior;
  GaussianBelief lat_posterior;
  double log_marginal = 0.0;
  double weight = 0.0;
};

/// Joint posterior draw (p1, v1, g*, v* | p2, v2, p_m): the two axes are
/// independent given the component. Consumes exactly 7 normals.
Eigen::VectorXd sample_theta(const GaussianBelief& lon_belief,
                             const GaussianBelief& lat_belief, RandomStream& rng);

/// Forward rollout of one theta draw from t = n to t = T under the
/// component's control laws. The leader moves at constant velocity from its
/// last smoothed state. Negative longitudinal velocities are clamped to zero,
/// starting with the sampled state itself. Returns positions for t = n+1..T.
std::vector<Eigen::Vector2d> propagate(const Eigen::VectorXd& theta,
                                       const ComponentModel& component,
                                       const Scene& scene, const RunConfig& cfg,
                                       const GainTable& gains, RandomStream& rng,
                                       bool include_noise);

struct WeightedTrajectory {
  double weight = 0.0;
  std::vector<Eigen::Vector2d> positions;  ///< t = n+1..T
};

struct PredictionSet {
  std::string scene_id;
  int n = 0;
  int T = 0;
  std::vector<ComponentModel> components;
  std::vector<WeightedTrajectory> samples;
};

/// Full inference pass over one scene: enumerate (lane, leader) pairs times
/// the merge-duration grid, filter each component on both axes, weight by
/// evidence, then draw and propagate cfg.n_samples trajectories per
/// component (each carrying weight / n_samples). Every component uses its own
/// rng stream derived from `seed`, so results are reproducible regardless of
/// evaluation order.
PredictionSet predict(const Scene& scene, const RunConfig& cfg,
                      std::uint64_t seed);

nlohmann::json prediction_to_json(const PredictionSet& pred);
PredictionSet prediction_from_json(const nlohmann::json& j);

}  // namespace kinpred
