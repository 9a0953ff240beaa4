#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace kinpred {

/// Driver-view sensing limits.
struct SensorConfig {
  double range_lon = 50.0;      ///< one-sided longitudinal sensing band, m
  double obstacle_radius = 2.0; ///< vehicles as spherical obstacles, m
  double min_obs_s = 1.0;       ///< minimum total visibility to keep a track, s
};

enum class ViewMode { bird, driver };

/// All run parameters with defaults matching the reference highway setup.
/// Loaded from / saved to JSON; validate() is called on every load.
struct RunConfig {
  double dt = 0.1;                 ///< timestep, s

  // merge-duration grid: 0..k_grid_max_s in k_grid_step_s increments
  double k_grid_max_s = 12.0;
  double k_grid_step_s = 0.5;

  int keep_horizon_ks = 100;       ///< lane-keep control horizon, steps
  int follow_horizon_kc = 100;     ///< car-following control horizon, steps

  double sigma_p = 1.5;            ///< prior std of desired lateral offset, m
  double sigma_g = 2.0;            ///< prior std of desired gap, m
  double sigma_v = 2.0;            ///< prior std of desired speed, m/s
  double sigma_lon = 0.05;         ///< longitudinal input noise scale (0.2 for NGSIM)
  double sigma_lat = 0.05;         ///< lateral input noise scale

  double tau_f = 50.0;             ///< field-of-view forward distance, m
  double tau_r = 10.0;             ///< field-of-view rear distance, m

  double obs_noise_std = 0.05;     ///< filter measurement noise std, m
  double init_pos_std = 0.05;      ///< initial belief: position std, m
  double init_vel_std = 2.0;       ///< initial belief: velocity std, m/s
  double smoother_obs_std = 0.05;  ///< surrounding-track smoother obs std, m

  double qde_q = 0.2;              ///< quantile for the QDE metric
  int n_samples = 4;               ///< trajectory samples per component
  std::uint64_t seed = 0;

  ViewMode view = ViewMode::bird;
  bool no_interaction = false;     ///< treat surrounding observations as empty
  bool include_noise = true;       ///< draw process noise in sampled rollouts
  bool clamp_leader = false;       ///< apply the velocity clamp to leader CV rollouts

  double obs_window_s = 3.0;
  double pred_horizon_s = 5.0;
  double stride_s = 5.0;           ///< spacing between evaluation windows
  int workers = 1;

  SensorConfig sensor;

  // dataset conventions
  std::string ngsim_unit = "feet";          ///< feet | meters
  std::string ngsim_lon_axis = "local_y";   ///< local_y | local_x

  /// Merge-duration grid converted to whole timesteps.
  std::vector<int> merge_grid_steps() const;

  int window_steps() const;  ///< n
  int total_steps() const;   ///< T

  /// Throws InvalidInput on any out-of-range field.
  void validate() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);
void save_config_file(const RunConfig& cfg, const std::string& path);

}  // namespace kinpred
