#include "scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "errors.hpp"

namespace kinpred {

using nlohmann::json;

std::vector<int> Track::observed_timesteps() const {
  std::vector<int> out;
  for (int t = 1; t <= length(); ++t) {
    if (observed[static_cast<std::size_t>(t - 1)]) out.push_back(t);
  }
  return out;
}

const Lane* Scene::lane_by_id(int lane_id) const {
  for (const Lane& lane : lanes) {
    if (lane.id == lane_id) return &lane;
  }
  return nullptr;
}

const Track* Scene::other_by_id(int vehicle_id) const {
  for (const Track& track : others) {
    if (track.id == vehicle_id) return &track;
  }
  return nullptr;
}

void Scene::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("scene: dt must be positive");
  if (n < 2) throw InvalidInput("scene: observation window must have n >= 2");
  if (T <= n) throw InvalidInput("scene: T must exceed n");
  if (lanes.empty()) throw InvalidInput("scene: no lanes");
  for (const Lane& lane : lanes) {
    if (!(lane.lower < lane.upper))
      throw InvalidInput("scene: lane interval must have lower < upper");
    if (!(lane.center > lane.lower && lane.center < lane.upper))
      throw InvalidInput("scene: lane center must lie inside its interval");
  }
  auto check_track = [this](const Track& track, bool is_target) {
    if (track.pos.size() != track.has.size() ||
        track.pos.size() != track.observed.size())
      throw InvalidInput("scene: track arrays disagree in length");
    for (int t = 1; t <= track.length(); ++t) {
      const std::size_t i = static_cast<std::size_t>(t - 1);
      if (track.observed[i] && !track.has[i])
        throw InvalidInput("scene: mask includes a timestep with no data");
      if (track.observed[i] && t > n)
        throw InvalidInput("scene: mask extends past the observation window");
      if (track.has[i] && !track.pos[i].allFinite())
        throw InvalidInput("scene: non-finite position");
    }
    if (is_target && !track.observed_at(1))
      throw InvalidInput("scene: target must be observed at t=1");
  };
  check_track(target, true);
  for (const Track& track : others) check_track(track, false);
}

int current_lane(const Scene& scene) {
  const double lateral = scene.target.at(1).y();
  for (const Lane& lane : scene.lanes) {
    if (lane.contains(lateral)) return lane.id;
  }
  throw InvalidInput("target's first observation lies outside every lane");
}

Interval field_of_view(double p, int q, double tau_f, double tau_r) {
  if (tau_f < 0.0 || tau_r < 0.0)
    throw InvalidInput("field of view distances must be nonnegative");
  return {p - (q != 0 ? tau_r : 0.0), p + tau_f};
}

std::vector<int> lead_candidates(const Scene& scene, int lane_id, double tau_f,
                                 double tau_r) {
  const Lane* lane = scene.lane_by_id(lane_id);
  if (lane == nullptr) throw InvalidInput("unknown lane id");
  const int own_lane = current_lane(scene);
  const int q = (own_lane != lane_id) ? 1 : 0;

  std::vector<int> ids;
  for (const Track& other : scene.others) {
    bool lateral_ok = false;
    bool longitudinal_ok = false;
    for (int t = 1; t <= scene.n; ++t) {
      if (!scene.target.observed_at(t) || !other.observed_at(t)) continue;
      if (!lateral_ok && lane->contains(other.at(t).y())) lateral_ok = true;
      if (!longitudinal_ok) {
        const Interval fov =
            field_of_view(scene.target.at(t).x(), q, tau_f, tau_r);
        if (fov.contains(other.at(t).x())) longitudinal_ok = true;
      }
      if (lateral_ok && longitudinal_ok) break;
    }
    if (lateral_ok && longitudinal_ok) ids.push_back(other.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<CandidatePair> candidate_set(const Scene& scene, double tau_f,
                                         double tau_r) {
  const int own_lane = current_lane(scene);
  const Lane* lane = scene.lane_by_id(own_lane);

  std::set<int> lane_ids{own_lane};
  for (int adj : lane->adjacent) {
    if (scene.lane_by_id(adj) != nullptr) lane_ids.insert(adj);
  }

  std::vector<CandidatePair> pairs;
  for (int lane_id : lane_ids) {
    const std::vector<int> leads = lead_candidates(scene, lane_id, tau_f, tau_r);
    if (leads.empty()) {
      pairs.push_back({lane_id, std::nullopt});
    } else {
      for (int j : leads) pairs.push_back({lane_id, j});
    }
  }
  return pairs;
}

namespace {

json track_to_json(const Track& track, const char* role) {
  json points = json::array();
  for (int t = 1; t <= track.length(); ++t) {
    if (!track.has_at(t)) continue;
    points.push_back({{"t", t}, {"x", track.at(t).x()}, {"y", track.at(t).y()}});
  }
  json mask = json::array();
  for (int t : track.observed_timesteps()) mask.push_back(t);
  return {{"id", track.id}, {"role", role}, {"points", points}, {"mask", mask}};
}

Track track_from_json(const json& j, int length) {
  Track track;
  track.id = j.at("id").get<int>();
  track.pos.assign(static_cast<std::size_t>(length), Eigen::Vector2d::Zero());
  track.has.assign(static_cast<std::size_t>(length), false);
  track.observed.assign(static_cast<std::size_t>(length), false);
  for (const json& p : j.at("points")) {
    const int t = p.at("t").get<int>();
    if (t < 1 || t > length)
      throw ParseError("scene: track point timestep outside 1..T");
    const std::size_t i = static_cast<std::size_t>(t - 1);
    if (track.has[i]) throw ParseError("scene: duplicate track point");
    track.pos[i] = Eigen::Vector2d(p.at("x").get<double>(), p.at("y").get<double>());
    track.has[i] = true;
  }
  for (const json& m : j.at("mask")) {
    const int t = m.get<int>();
    if (t < 1 || t > length) throw ParseError("scene: mask timestep outside 1..T");
    track.observed[static_cast<std::size_t>(t - 1)] = true;
  }
  return track;
}

}  // namespace

json scene_to_json(const Scene& scene) {
  json lanes = json::array();
  for (const Lane& lane : scene.lanes) {
    lanes.push_back({{"id", lane.id},
                     {"lower", lane.lower},
                     {"upper", lane.upper},
                     {"center", lane.center},
                     {"adjacent", lane.adjacent}});
  }
  json tracks = json::array();
  tracks.push_back(track_to_json(scene.target, "target"));
  for (const Track& other : scene.others) {
    tracks.push_back(track_to_json(other, "other"));
  }
  json j{{"dt", scene.dt}, {"n", scene.n}, {"T", scene.T},
         {"lanes", lanes}, {"tracks", tracks}};
  if (!scene.id.empty()) j["id"] = scene.id;
  return j;
}

Scene scene_from_json(const json& j) {
  Scene scene;
  try {
    if (j.contains("id")) scene.id = j.at("id").get<std::string>();
    scene.dt = j.at("dt").get<double>();
    scene.n = j.at("n").get<int>();
    scene.T = j.at("T").get<int>();
    for (const json& lj : j.at("lanes")) {
      Lane lane;
      lane.id = lj.at("id").get<int>();
      lane.lower = lj.at("lower").get<double>();
      lane.upper = lj.at("upper").get<double>();
      lane.center = lj.at("center").get<double>();
      if (lj.contains("adjacent"))
        lane.adjacent = lj.at("adjacent").get<std::vector<int>>();
      scene.lanes.push_back(lane);
    }
    bool have_target = false;
    for (const json& tj : j.at("tracks")) {
      const std::string role = tj.at("role").get<std::string>();
      Track track = track_from_json(tj, scene.T);
      if (role == "target") {
        if (have_target) throw ParseError("scene: more than one target track");
        scene.target = std::move(track);
        have_target = true;
      } else if (role == "other") {
        scene.others.push_back(std::move(track));
      } else {
        throw ParseError("scene: unknown track role: " + role);
      }
    }
    if (!have_target) throw ParseError("scene: missing target track");
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene: ") + e.what());
  }
  scene.validate();
  return scene;
}

}  // namespace kinpred
