#include "behavior.hpp"

#include <cmath>

#include "errors.hpp"

namespace kinpred {

double lon_control(const AxisState& state, double g_star, double v_star,
                   const AxisState& leader, int kc, const GainTable& gains) {
  const FirstInputGains& g = gains.at(kc);
  const double target_pos =
      leader.position + kc * gains.mats().dt * leader.velocity - g_star;
  return g.state_gain(0) * state.position + g.state_gain(1) * state.velocity +
         g.target_gain(0) * target_pos + g.target_gain(1) * v_star;
}

double lon_control_no_lead(double velocity, double v_star, int kf) {
  if (kf < 1) throw InvalidInput("free-driving horizon must be >= 1");
  return (v_star - velocity) / kf;
}

int lat_horizon(int k, int t, int ks) {
  if (t < 0) throw InvalidInput("lat_horizon: t must be nonnegative");
  if (ks < 2) throw InvalidInput("lat_horizon: lane-keep horizon must be >= 2");
  return (k - t > 2) ? (k - t) : ks;
}

double lat_control(const AxisState& state, double p_m, int k, int t, int ks,
                   const GainTable& gains) {
  const int horizon = lat_horizon(k, t, ks);
  const FirstInputGains& g = gains.at(horizon);
  return g.state_gain(0) * state.position + g.state_gain(1) * state.velocity +
         g.target_gain(0) * p_m;
}

Eigen::RowVector3d lat_control_coeffs(int k, int elapsed, int ks,
                                      const GainTable& gains) {
  const int remaining = k - elapsed;
  if (remaining == 1) {
    // one step from completion: zero the velocity; position lands on p_m
    // when the state is on the merge path
    return {0.0, -1.0, 0.0};
  }
  const int horizon = remaining >= 2 ? remaining : ks;
  const FirstInputGains& g = gains.at(horizon);
  return {g.state_gain(0), g.state_gain(1), g.target_gain(0)};
}

double lat_rollout_control(const AxisState& state, double p_m, int k,
                           int elapsed, int ks, const GainTable& gains) {
  const Eigen::RowVector3d coeffs = lat_control_coeffs(k, elapsed, ks, gains);
  return coeffs(0) * state.position + coeffs(1) * state.velocity + coeffs(2) * p_m;
}

namespace {

// first two observed timesteps of the target
std::pair<int, int> first_two_observed(const Scene& scene) {
  int first = -1, second = -1;
  for (int t = 1; t <= scene.n; ++t) {
    if (!scene.target.observed_at(t)) continue;
    if (first < 0) {
      first = t;
    } else {
      second = t;
      break;
    }
  }
  if (second < 0)
    throw InvalidInput("target needs at least 2 observed timesteps");
  return {first, second};
}

std::pair<int, int> last_two_observed(const Scene& scene) {
  int last = -1, prev = -1;
  for (int t = scene.n; t >= 1; --t) {
    if (!scene.target.observed_at(t)) continue;
    if (last < 0) {
      last = t;
    } else {
      prev = t;
      break;
    }
  }
  if (prev < 0)
    throw InvalidInput("target needs at least 2 observed timesteps");
  return {prev, last};
}

}  // namespace

ParamPriors priors_from_observations(const Scene& scene, double lane_center,
                                     const std::optional<AxisState>& leader_at_n) {
  const auto [prev, last] = last_two_observed(scene);
  ParamPriors priors;
  priors.lane_center = lane_center;
  priors.speed_mean = (scene.target.at(last).x() - scene.target.at(prev).x()) /
                      ((last - prev) * scene.dt);
  if (leader_at_n.has_value()) {
    priors.gap_mean = leader_at_n->position - scene.target.at(last).x();
  }
  return priors;
}

GaussianBelief initial_lon_belief(const Scene& scene, const ParamPriors& priors,
                                  const LongitudinalModel& model,
                                  const RunConfig& cfg) {
  if (model.leader.has_value() != priors.gap_mean.has_value())
    throw InvalidInput("leader presence disagrees between model and priors");
  const auto [first, second] = first_two_observed(scene);
  const double v0 = (scene.target.at(second).x() - scene.target.at(first).x()) /
                    ((second - first) * scene.dt);
  GaussianBelief belief;
  belief.mean = Eigen::Vector4d(scene.target.at(first).x(), v0,
                                priors.gap_mean.value_or(0.0), priors.speed_mean);
  belief.cov = Eigen::Vector4d(cfg.init_pos_std * cfg.init_pos_std,
                               cfg.init_vel_std * cfg.init_vel_std,
                               model.sigma_g * model.sigma_g,
                               model.sigma_v * model.sigma_v)
                   .asDiagonal();
  return belief;
}

GaussianBelief initial_lat_belief(const Scene& scene, const ParamPriors& priors,
                                  const LateralModel& model,
                                  const RunConfig& cfg) {
  const auto [first, second] = first_two_observed(scene);
  const double v0 = (scene.target.at(second).y() - scene.target.at(first).y()) /
                    ((second - first) * scene.dt);
  GaussianBelief belief;
  belief.mean = Eigen::Vector3d(scene.target.at(first).y(), v0, priors.lane_center);
  belief.cov = Eigen::Vector3d(cfg.init_pos_std * cfg.init_pos_std,
                               cfg.init_vel_std * cfg.init_vel_std,
                               model.sigma_p * model.sigma_p)
                   .asDiagonal();
  return belief;
}

AugmentedSystem build_lon_system(const LongitudinalModel& model,
                                 const std::vector<AxisState>* leader_track,
                                 const GaussianBelief& prior, double obs_noise_var,
                                 const GainTable& gains, int n) {
  if (model.leader.has_value() != (leader_track != nullptr))
    throw InvalidInput("leader track must be supplied iff the model has a leader");
  if (leader_track != nullptr && static_cast<int>(leader_track->size()) < n)
    throw InvalidInput("leader track does not cover the observation window");
  if (model.horizon_kc < 2)
    throw InvalidInput("follow horizon must be >= 2");
  if (prior.mean.size() != 4)
    throw InvalidInput("longitudinal prior must be 4-dimensional");

  const double dt = gains.mats().dt;
  AugmentedSystem sys;
  sys.dim = 4;
  sys.length = n;
  sys.Q = Eigen::MatrixXd::Zero(4, 4);
  sys.Q(1, 1) = model.sigma_lon * model.sigma_lon;
  sys.H = Eigen::RowVectorXd::Zero(4);
  sys.H(0) = 1.0;
  sys.R = obs_noise_var;
  sys.prior = prior;

  // control row acting on z = (p1, v1, g*, v*), plus a leader-driven offset
  Eigen::RowVector4d u_coeffs;
  double target_gain_pos = 0.0;
  if (model.leader.has_value()) {
    const FirstInputGains& g = gains.at(model.horizon_kc);
    u_coeffs << g.state_gain(0), g.state_gain(1), -g.target_gain(0),
        g.target_gain(1);
    target_gain_pos = g.target_gain(0);
  } else {
    const double inv_kf = 1.0 / model.horizon_kc;
    u_coeffs << 0.0, -inv_kf, 0.0, inv_kf;
  }

  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = dt;
  f.row(1) += u_coeffs;  // B = (0,1)^T: the input feeds the velocity row

  sys.F.reserve(static_cast<std::size_t>(n) - 1);
  sys.c.reserve(static_cast<std::size_t>(n) - 1);
  for (int t = 1; t < n; ++t) {
    sys.F.push_back(f);
    Eigen::Vector4d offset = Eigen::Vector4d::Zero();
    if (model.leader.has_value()) {
      const AxisState& lead = (*leader_track)[static_cast<std::size_t>(t - 1)];
      offset(1) = target_gain_pos *
                  (lead.position + model.horizon_kc * dt * lead.velocity);
    }
    sys.c.push_back(offset);
  }
  return sys;
}

AugmentedSystem build_lat_system(const LateralModel& model,
                                 const GaussianBelief& prior, double obs_noise_var,
                                 const GainTable& gains, int n) {
  if (model.merge_steps < 0)
    throw InvalidInput("merge duration must be nonnegative");
  if (model.keep_horizon_ks < 2)
    throw InvalidInput("lane-keep horizon must be >= 2");
  if (prior.mean.size() != 3)
    throw InvalidInput("lateral prior must be 3-dimensional");

  const double dt = gains.mats().dt;
  AugmentedSystem sys;
  sys.dim = 3;
  sys.length = n;
  sys.Q = Eigen::MatrixXd::Zero(3, 3);
  sys.Q(1, 1) = model.sigma_lat * model.sigma_lat;
  sys.H = Eigen::RowVectorXd::Zero(3);
  sys.H(0) = 1.0;
  sys.R = obs_noise_var;
  sys.prior = prior;

  sys.F.reserve(static_cast<std::size_t>(n) - 1);
  sys.c.reserve(static_cast<std::size_t>(n) - 1);
  for (int t = 1; t < n; ++t) {
    const Eigen::RowVector3d u_coeffs =
        lat_control_coeffs(model.merge_steps, t - 1, model.keep_horizon_ks, gains);
    Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
    f(0, 1) = dt;
    f.row(1) += u_coeffs;
    sys.F.push_back(f);
    sys.c.push_back(Eigen::Vector3d::Zero());
  }
  return sys;
}

std::vector<Eigen::VectorXd> simulate_noiseless(const AugmentedSystem& sys,
                                                const Eigen::VectorXd& z1) {
  if (z1.size() != sys.dim) throw InvalidInput("state dimension mismatch");
  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<std::size_t>(sys.length));
  states.push_back(z1);
  for (std::size_t t = 0; t + 1 < static_cast<std::size_t>(sys.length); ++t) {
    states.push_back(sys.F[t] * states.back() + sys.c[t]);
  }
  return states;
}

}  // namespace kinpred
