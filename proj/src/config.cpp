#include "config.hpp"

#include <cmath>
#include <fstream>

#include "errors.hpp"

namespace kinpred {

using nlohmann::json;

std::vector<int> RunConfig::merge_grid_steps() const {
  std::vector<int> grid;
  const int count = static_cast<int>(std::round(k_grid_max_s / k_grid_step_s)) + 1;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    grid.push_back(static_cast<int>(std::round(i * k_grid_step_s / dt)));
  }
  return grid;
}

int RunConfig::window_steps() const {
  return static_cast<int>(std::round(obs_window_s / dt));
}

int RunConfig::total_steps() const {
  return window_steps() + static_cast<int>(std::round(pred_horizon_s / dt));
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidInput(std::string("config: ") + what);
  };
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(k_grid_max_s >= 0.0, "k_grid_max_s must be nonnegative");
  require(k_grid_step_s > 0.0, "k_grid_step_s must be positive");
  require(keep_horizon_ks >= 2, "keep_horizon_ks must be >= 2");
  require(follow_horizon_kc >= 2, "follow_horizon_kc must be >= 2");
  require(sigma_p > 0.0, "sigma_p must be positive");
  require(sigma_g > 0.0, "sigma_g must be positive");
  require(sigma_v > 0.0, "sigma_v must be positive");
  require(sigma_lon > 0.0, "sigma_lon must be positive");
  require(sigma_lat > 0.0, "sigma_lat must be positive");
  require(tau_f >= 0.0, "tau_f must be nonnegative");
  require(tau_r >= 0.0, "tau_r must be nonnegative");
  require(obs_noise_std > 0.0, "obs_noise_std must be positive");
  require(init_pos_std > 0.0, "init_pos_std must be positive");
  require(init_vel_std > 0.0, "init_vel_std must be positive");
  require(smoother_obs_std > 0.0, "smoother_obs_std must be positive");
  require(qde_q > 0.0 && qde_q <= 1.0, "qde_q must be in (0, 1]");
  require(n_samples >= 1, "n_samples must be >= 1");
  require(obs_window_s > 0.0, "obs_window_s must be positive");
  require(pred_horizon_s > 0.0, "pred_horizon_s must be positive");
  require(stride_s > 0.0, "stride_s must be positive");
  require(workers >= 1, "workers must be >= 1");
  require(sensor.range_lon > 0.0, "sensor.range_lon must be positive");
  require(sensor.obstacle_radius > 0.0, "sensor.obstacle_radius must be positive");
  require(sensor.min_obs_s > 0.0, "sensor.min_obs_s must be positive");
  require(window_steps() >= 2, "observation window must cover >= 2 steps");
  require(total_steps() > window_steps(), "prediction horizon must be nonempty");
  require(ngsim_unit == "feet" || ngsim_unit == "meters",
          "ngsim_unit must be feet or meters");
  require(ngsim_lon_axis == "local_y" || ngsim_lon_axis == "local_x",
          "ngsim_lon_axis must be local_y or local_x");
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["dt"] = cfg.dt;
  j["k_grid_max_s"] = cfg.k_grid_max_s;
  j["k_grid_step_s"] = cfg.k_grid_step_s;
  j["keep_horizon_ks"] = cfg.keep_horizon_ks;
  j["follow_horizon_kc"] = cfg.follow_horizon_kc;
  j["sigma_p"] = cfg.sigma_p;
  j["sigma_g"] = cfg.sigma_g;
  j["sigma_v"] = cfg.sigma_v;
  j["sigma_lon"] = cfg.sigma_lon;
  j["sigma_lat"] = cfg.sigma_lat;
  j["tau_f"] = cfg.tau_f;
  j["tau_r"] = cfg.tau_r;
  j["obs_noise_std"] = cfg.obs_noise_std;
  j["init_pos_std"] = cfg.init_pos_std;
  j["init_vel_std"] = cfg.init_vel_std;
  j["smoother_obs_std"] = cfg.smoother_obs_std;
  j["qde_q"] = cfg.qde_q;
  j["n_samples"] = cfg.n_samples;
  j["seed"] = cfg.seed;
  j["view"] = cfg.view == ViewMode::bird ? "bird" : "driver";
  j["no_interaction"] = cfg.no_interaction;
  j["include_noise"] = cfg.include_noise;
  j["clamp_leader"] = cfg.clamp_leader;
  j["obs_window_s"] = cfg.obs_window_s;
  j["pred_horizon_s"] = cfg.pred_horizon_s;
  j["stride_s"] = cfg.stride_s;
  j["workers"] = cfg.workers;
  j["sensor"] = {{"range_lon", cfg.sensor.range_lon},
                 {"obstacle_radius", cfg.sensor.obstacle_radius},
                 {"min_obs_s", cfg.sensor.min_obs_s}};
  j["ngsim_unit"] = cfg.ngsim_unit;
  j["ngsim_lon_axis"] = cfg.ngsim_lon_axis;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
  };
  get("dt", cfg.dt);
  get("k_grid_max_s", cfg.k_grid_max_s);
  get("k_grid_step_s", cfg.k_grid_step_s);
  get("keep_horizon_ks", cfg.keep_horizon_ks);
  get("follow_horizon_kc", cfg.follow_horizon_kc);
  get("sigma_p", cfg.sigma_p);
  get("sigma_g", cfg.sigma_g);
  get("sigma_v", cfg.sigma_v);
  get("sigma_lon", cfg.sigma_lon);
  get("sigma_lat", cfg.sigma_lat);
  get("tau_f", cfg.tau_f);
  get("tau_r", cfg.tau_r);
  get("obs_noise_std", cfg.obs_noise_std);
  get("init_pos_std", cfg.init_pos_std);
  get("init_vel_std", cfg.init_vel_std);
  get("smoother_obs_std", cfg.smoother_obs_std);
  get("qde_q", cfg.qde_q);
  get("n_samples", cfg.n_samples);
  get("seed", cfg.seed);
  if (j.contains("view")) {
    const std::string v = j.at("view").get<std::string>();
    if (v == "bird") {
      cfg.view = ViewMode::bird;
    } else if (v == "driver") {
      cfg.view = ViewMode::driver;
    } else {
      throw InvalidInput("config: view must be bird or driver");
    }
  }
  get("no_interaction", cfg.no_interaction);
  get("include_noise", cfg.include_noise);
  get("clamp_leader", cfg.clamp_leader);
  get("obs_window_s", cfg.obs_window_s);
  get("pred_horizon_s", cfg.pred_horizon_s);
  get("stride_s", cfg.stride_s);
  get("workers", cfg.workers);
  if (j.contains("sensor")) {
    const json& s = j.at("sensor");
    if (s.contains("range_lon")) cfg.sensor.range_lon = s.at("range_lon").get<double>();
    if (s.contains("obstacle_radius"))
      cfg.sensor.obstacle_radius = s.at("obstacle_radius").get<double>();
    if (s.contains("min_obs_s")) cfg.sensor.min_obs_s = s.at("min_obs_s").get<double>();
  }
  get("ngsim_unit", cfg.ngsim_unit);
  get("ngsim_lon_axis", cfg.ngsim_lon_axis);
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config_file(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write config file: " + path);
  out << config_to_json(cfg).dump(2) << "\n";
}

}  // namespace kinpred
