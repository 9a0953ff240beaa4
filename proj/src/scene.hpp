#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace kinpred {

/// One vehicle's samples on the shared timestep grid. Timesteps are 1-based
/// in all interfaces; storage is 0-based (index t-1).
struct Track {
  int id = 0;
  std::vector<Eigen::Vector2d> pos;  ///< (longitudinal, lateral), meters
  std::vector<bool> has;             ///< raw data present at t
  std::vector<bool> observed;        ///< t is in the observation mask

  int length() const { return static_cast<int>(pos.size()); }
  bool has_at(int t) const {
    return t >= 1 && t <= length() && has[static_cast<std::size_t>(t - 1)];
  }
  bool observed_at(int t) const {
    return t >= 1 && t <= length() && observed[static_cast<std::size_t>(t - 1)];
  }
  const Eigen::Vector2d& at(int t) const { return pos[static_cast<std::size_t>(t - 1)]; }

  /// Observed timesteps in ascending order.
  std::vector<int> observed_timesteps() const;
};

/// Lateral lane interval [lower, upper), half-open so boundary values resolve
/// deterministically.
struct Lane {
  int id = 0;
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  std::vector<int> adjacent;

  bool contains(double lateral) const { return lateral >= lower && lateral < upper; }
};

/// Observation context for one prediction: target track, surrounding tracks,
/// lane geometry, and the window/horizon bounds.
struct Scene {
  std::string id;
  double dt = 0.1;
  int n = 0;  ///< observation-window length, timesteps
  int T = 0;  ///< final prediction timestep
  Track target;
  std::vector<Track> others;
  std::vector<Lane> lanes;

  const Lane* lane_by_id(int lane_id) const;
  const Track* other_by_id(int vehicle_id) const;

  /// Structural checks: n < T, target observed at t=1, masks inside the
  /// window, finite positions, well-formed lanes. Throws InvalidInput.
  void validate() const;
};

/// One behavior hypothesis: a candidate lane and an optional lead vehicle.
struct CandidatePair {
  int lane = 0;
  std::optional<int> leader;

  bool operator==(const CandidatePair&) const = default;
};

/// Longitudinal field-of-view interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Lane containing the target's first observation. Throws InvalidInput when
/// the lateral position falls outside every lane.
int current_lane(const Scene& scene);

/// [p - q*tau_r, p + tau_f]; q=1 includes the rear portion.
Interval field_of_view(double p, int q, double tau_f, double tau_r);

/// Vehicles observed at least once inside the lane's lateral interval and at
/// least once inside the longitudinal field of view. The two conditions may
/// hold at different timesteps. Sorted by vehicle id.
std::vector<int> lead_candidates(const Scene& scene, int lane_id, double tau_f,
                                 double tau_r);

/// All (lane, leader) pairs over the current lane and its neighbors; a lane
/// with no lead candidates contributes the single pair (lane, none).
/// Deterministically ordered: lanes ascending, leaders ascending, none last.
std::vector<CandidatePair> candidate_set(const Scene& scene, double tau_f,
                                         double tau_r);

// --- canonical JSON form ---------------------------------------------------
// {id?, dt, n, T, lanes:[{id, lower, upper, center, adjacent:[]}],
//  tracks:[{id, role, points:[{t, x, y}], mask:[...]}]}
// x is the longitudinal coordinate, y the lateral one.

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

}  // namespace kinpred
