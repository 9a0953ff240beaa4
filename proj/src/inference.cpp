#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "errors.hpp"
#include "sensing.hpp"

namespace kinpred {

FilterResult kalman_filter(const AugmentedSystem& sys,
                           const std::vector<double>& observations,
                           const std::vector<bool>& mask) {
  if (static_cast<int>(observations.size()) != sys.length ||
      static_cast<int>(mask.size()) != sys.length)
    throw InvalidInput("kalman_filter: observations must cover the window");
  if (sys.prior.mean.size() != sys.dim)
    throw InvalidInput("kalman_filter: prior dimension mismatch");

  Eigen::VectorXd mean = sys.prior.mean;
  Eigen::MatrixXd cov = sys.prior.cov;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(sys.dim, sys.dim);
  double log_marginal = 0.0;

  for (int t = 1; t <= sys.length; ++t) {
    if (t > 1) {
      const Eigen::MatrixXd& f = sys.F[static_cast<std::size_t>(t - 2)];
      mean = f * mean + sys.c[static_cast<std::size_t>(t - 2)];
      cov = f * cov * f.transpose() + sys.Q;
    }
    if (!mask[static_cast<std::size_t>(t - 1)]) continue;

    const double innovation =
        observations[static_cast<std::size_t>(t - 1)] - (sys.H * mean)(0);
    const double s = (sys.H * cov * sys.H.transpose())(0) + sys.R;
    if (!std::isfinite(s) || s <= 0.0)
      throw NumericError("kalman_filter: nonpositive innovation variance");
    log_marginal -= 0.5 * (std::log(2.0 * std::numbers::pi * s) +
                           innovation * innovation / s);

    const Eigen::VectorXd gain = cov * sys.H.transpose() / s;
    mean += gain * innovation;
    // Joseph form keeps the covariance symmetric PSD under roundoff
    const Eigen::MatrixXd j = eye - gain * sys.H;
    cov = j * cov * j.transpose() + gain * sys.R * gain.transpose();
    cov = 0.5 * (cov + cov.transpose().eval());
    if (cov.diagonal().minCoeff() < -1e-10)
      throw NumericError("kalman_filter: covariance lost positive semidefiniteness");
  }
  return {GaussianBelief{std::move(mean), std::move(cov)}, log_marginal};
}

std::vector<double> component_weights(const std::vector<double>& log_marginals) {
  if (log_marginals.empty())
    throw InvalidInput("component_weights: empty input");
  const double peak =
      *std::max_element(log_marginals.begin(), log_marginals.end());
  if (!std::isfinite(peak))
    throw NumericError("component_weights: no viable component");
  std::vector<double> weights(log_marginals.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_marginals.size(); ++i) {
    weights[i] = std::exp(log_marginals[i] - peak);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

namespace {

Eigen::VectorXd draw_gaussian(const GaussianBelief& belief, RandomStream& rng) {
  const Eigen::Index d = belief.mean.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(belief.cov);
  if (es.info() != Eigen::Success)
    throw NumericError("sample_theta: covariance factorization failed");
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  Eigen::VectorXd scale = es.eigenvalues();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (scale(i) < -1e-8)
      throw NumericError("sample_theta: covariance not positive semidefinite");
    scale(i) = std::sqrt(std::max(scale(i), 0.0));
  }
  return belief.mean + es.eigenvectors() * scale.asDiagonal() * z;
}

}  // namespace

Eigen::VectorXd sample_theta(const GaussianBelief& lon_belief,
                             const GaussianBelief& lat_belief, RandomStream& rng) {
  if (lon_belief.mean.size() != 4 || lat_belief.mean.size() != 3)
    throw InvalidInput("sample_theta: beliefs must be 4- and 3-dimensional");
  Eigen::VectorXd theta(7);
  theta.head<4>() = draw_gaussian(lon_belief, rng);
  theta.tail<3>() = draw_gaussian(lat_belief, rng);
  return theta;
}

std::vector<Eigen::Vector2d> propagate(const Eigen::VectorXd& theta,
                                       const ComponentModel& component,
                                       const Scene& scene, const RunConfig& cfg,
                                       const GainTable& gains, RandomStream& rng,
                                       bool include_noise) {
  if (theta.size() != 7) throw InvalidInput("propagate: theta must have 7 entries");
  if (!theta.allFinite()) throw InvalidInput("propagate: theta must be finite");
  if (component.pair.leader.has_value() != component.leader_at_n.has_value())
    throw InvalidInput("propagate: leader state missing");

  const double dt = gains.mats().dt;
  AxisState lon{theta(0), std::max(theta(1), 0.0)};
  AxisState lat{theta(4), theta(5)};
  const double g_star = theta(2);
  const double v_star = theta(3);
  const double p_m = theta(6);

  std::optional<AxisState> leader = component.leader_at_n;
  if (leader.has_value() && cfg.clamp_leader)
    leader->velocity = std::max(leader->velocity, 0.0);

  std::vector<Eigen::Vector2d> positions;
  positions.reserve(static_cast<std::size_t>(scene.T - scene.n));
  for (int t = scene.n; t < scene.T; ++t) {
    double u_lon =
        leader.has_value()
            ? lon_control(lon, g_star, v_star, *leader, cfg.follow_horizon_kc,
                          gains)
            : lon_control_no_lead(lon.velocity, v_star, cfg.follow_horizon_kc);
    double u_lat = lat_rollout_control(lat, p_m, component.merge_steps, t - 1,
                                       cfg.keep_horizon_ks, gains);
    if (include_noise) {
      u_lon += cfg.sigma_lon * rng.normal();
      u_lat += cfg.sigma_lat * rng.normal();
    }
    lon = {lon.position + dt * lon.velocity,
           std::max(lon.velocity + u_lon, 0.0)};
    lat = {lat.position + dt * lat.velocity, lat.velocity + u_lat};
    if (leader.has_value()) leader->position += dt * leader->velocity;
    positions.emplace_back(lon.position, lat.position);
  }
  return positions;
}

PredictionSet predict(const Scene& scene, const RunConfig& cfg,
                      std::uint64_t seed) {
  scene.validate();
  Scene working = scene;
  if (cfg.no_interaction) working.others.clear();

  const int n = working.n;
  const std::vector<int> k_grid = cfg.merge_grid_steps();
  int max_horizon = std::max(cfg.keep_horizon_ks, cfg.follow_horizon_kc);
  for (int k : k_grid) max_horizon = std::max(max_horizon, k);
  const GainTable gains(step_matrices(working.dt), std::max(max_horizon, 2));

  const std::vector<CandidatePair> pairs =
      candidate_set(working, cfg.tau_f, cfg.tau_r);
  const double obs_var = cfg.obs_noise_std * cfg.obs_noise_std;

  std::vector<double> obs_x(static_cast<std::size_t>(n), 0.0);
  std::vector<double> obs_y(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (int t = 1; t <= n; ++t) {
    const std::size_t i = static_cast<std::size_t>(t - 1);
    mask[i] = working.target.observed_at(t);
    if (mask[i]) {
      obs_x[i] = working.target.at(t).x();
      obs_y[i] = working.target.at(t).y();
    }
  }

  // One longitudinal filter per distinct leader hypothesis; the lane does
  // not enter the longitudinal system.
  struct LonResult {
    FilterResult filter;
    std::optional<AxisState> leader_at_n;
  };
  std::map<int, LonResult> lon_by_leader;
  std::optional<LonResult> lon_free;
  for (const CandidatePair& pair : pairs) {
    if (pair.leader.has_value()) {
      if (lon_by_leader.count(*pair.leader) != 0) continue;
      const Track* track = working.other_by_id(*pair.leader);
      if (track == nullptr)
        throw InvalidInput("predict: candidate leader missing from scene");
      const std::vector<AxisState> smoothed = smooth_longitudinal(
          *track, n, working.dt, cfg.sigma_lon, cfg.smoother_obs_std);
      const AxisState at_n = smoothed[static_cast<std::size_t>(n - 1)];
      const ParamPriors priors = priors_from_observations(working, 0.0, at_n);
      const LongitudinalModel model{pair.leader, cfg.follow_horizon_kc,
                                    cfg.sigma_g, cfg.sigma_v, cfg.sigma_lon};
      const GaussianBelief prior = initial_lon_belief(working, priors, model, cfg);
      const AugmentedSystem sys =
          build_lon_system(model, &smoothed, prior, obs_var, gains, n);
      lon_by_leader.emplace(*pair.leader,
                            LonResult{kalman_filter(sys, obs_x, mask), at_n});
    } else if (!lon_free.has_value()) {
      const ParamPriors priors =
          priors_from_observations(working, 0.0, std::nullopt);
      const LongitudinalModel model{std::nullopt, cfg.follow_horizon_kc,
                                    cfg.sigma_g, cfg.sigma_v, cfg.sigma_lon};
      const GaussianBelief prior = initial_lon_belief(working, priors, model, cfg);
      const AugmentedSystem sys =
          build_lon_system(model, nullptr, prior, obs_var, gains, n);
      lon_free = LonResult{kalman_filter(sys, obs_x, mask), std::nullopt};
    }
  }

  // One lateral filter per (lane, merge duration); the leader does not enter.
  std::map<std::pair<int, int>, FilterResult> lat_by_lane_k;
  for (const CandidatePair& pair : pairs) {
    const Lane* lane = working.lane_by_id(pair.lane);
    if (lane == nullptr)
      throw InvalidInput("predict: candidate lane missing from scene");
    for (int k : k_grid) {
      const std::pair<int, int> key{pair.lane, k};
      if (lat_by_lane_k.count(key) != 0) continue;
      const ParamPriors priors =
          priors_from_observations(working, lane->center, std::nullopt);
      const LateralModel model{lane->center, k, cfg.keep_horizon_ks, cfg.sigma_p,
                               cfg.sigma_lat};
      const GaussianBelief prior = initial_lat_belief(working, priors, model, cfg);
      const AugmentedSystem sys =
          build_lat_system(model, prior, obs_var, gains, n);
      lat_by_lane_k.emplace(key, kalman_filter(sys, obs_y, mask));
    }
  }

  PredictionSet out;
  out.scene_id = working.id;
  out.n = n;
  out.T = working.T;
  out.components.reserve(pairs.size() * k_grid.size());
  std::vector<double> log_marginals;
  log_marginals.reserve(pairs.size() * k_grid.size());
  for (const CandidatePair& pair : pairs) {
    const LonResult& lon =
        pair.leader.has_value() ? lon_by_leader.at(*pair.leader) : *lon_free;
    for (int k : k_grid) {
      const FilterResult& lat = lat_by_lane_k.at({pair.lane, k});
      ComponentModel comp;
      comp.pair = pair;
      comp.merge_steps = k;
      comp.k_seconds = k * working.dt;
      comp.leader_at_n = lon.leader_at_n;
      comp.lon_posterior = lon.filter.posterior;
      comp.lat_posterior = lat.posterior;
      comp.log_marginal = lon.filter.log_marginal + lat.log_marginal;
      log_marginals.push_back(comp.log_marginal);
      out.components.push_back(std::move(comp));
    }
  }

  const std::vector<double> weights = component_weights(log_marginals);
  out.samples.reserve(out.components.size() *
                      static_cast<std::size_t>(cfg.n_samples));
  for (std::size_t ci = 0; ci < out.components.size(); ++ci) {
    ComponentModel& comp = out.components[ci];
    comp.weight = weights[ci];
    RandomStream rng(derive_seed(seed, ci));
    for (int s = 0; s < cfg.n_samples; ++s) {
      WeightedTrajectory traj;
      traj.weight = comp.weight / cfg.n_samples;
      const Eigen::VectorXd theta =
          sample_theta(comp.lon_posterior, comp.lat_posterior, rng);
      traj.positions =
          propagate(theta, comp, working, cfg, gains, rng, cfg.include_noise);
      out.samples.push_back(std::move(traj));
    }
  }
  return out;
}

nlohmann::json prediction_to_json(const PredictionSet& pred) {
  using nlohmann::json;
  json components = json::array();
  for (const ComponentModel& c : pred.components) {
    json jc{{"lane", c.pair.lane},
            {"k_seconds", c.k_seconds},
            {"log_marginal", c.log_marginal},
            {"weight", c.weight}};
    if (c.pair.leader.has_value())
      jc["leader"] = *c.pair.leader;
    else
      jc["leader"] = nullptr;
    components.push_back(std::move(jc));
  }
  json samples = json::array();
  for (const WeightedTrajectory& s : pred.samples) {
    json points = json::array();
    int t = pred.n + 1;
    for (const Eigen::Vector2d& p : s.positions) {
      points.push_back(json{{"t", t}, {"x", p.x()}, {"y", p.y()}});
      ++t;
    }
    samples.push_back(json{{"weight", s.weight}, {"points", std::move(points)}});
  }
  return json{{"scene", pred.scene_id},
              {"n", pred.n},
              {"T", pred.T},
              {"components", std::move(components)},
              {"samples", std::move(samples)}};
}

PredictionSet prediction_from_json(const nlohmann::json& j) {
  using nlohmann::json;
  if (!j.is_object() || !j.contains("components") || !j.contains("samples"))
    throw ParseError("prediction: missing components/samples");
  PredictionSet pred;
  pred.scene_id = j.value("scene", std::string{});
  pred.n = j.value("n", 0);
  pred.T = j.value("T", 0);
  for (const json& jc : j.at("components")) {
    ComponentModel comp;
    comp.pair.lane = jc.at("lane").get<int>();
    if (jc.contains("leader") && !jc.at("leader").is_null())
      comp.pair.leader = jc.at("leader").get<int>();
    comp.k_seconds = jc.at("k_seconds").get<double>();
    comp.log_marginal = jc.at("log_marginal").get<double>();
    comp.weight = jc.at("weight").get<double>();
    pred.components.push_back(std::move(comp));
  }
  for (const json& js : j.at("samples")) {
    WeightedTrajectory traj;
    traj.weight = js.at("weight").get<double>();
    int expected_t = pred.n + 1;
    for (const json& jp : js.at("points")) {
      const int t = jp.at("t").get<int>();
      if (pred.n > 0 && t != expected_t)
        throw ParseError("prediction: sample points must be consecutive from n+1");
      ++expected_t;
      traj.positions.emplace_back(jp.at("x").get<double>(),
                                  jp.at("y").get<double>());
    }
    pred.samples.push_back(std::move(traj));
  }
  return pred;
}

}  // namespace kinpred
