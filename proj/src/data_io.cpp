#include "data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "errors.hpp"

namespace kinpred {

namespace {

constexpr double kFeetToMeters = 0.3048;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(trim(field));
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ParseError("missing column '" + name + "'");
    return static_cast<int>(it - header.begin());
  }
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (first) {
      csv.header = split(line, ',');
      first = false;
    } else {
      csv.rows.push_back(split(line, ','));
    }
  }
  return csv;
}

double parse_double(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

int parse_int(const std::string& s, std::size_t row) {
  const double v = parse_double(s, row);
  const int i = static_cast<int>(std::llround(v));
  if (std::abs(v - i) > 1e-9)
    throw ParseError("row " + std::to_string(row) + ": expected integer '" + s + "'");
  return i;
}

/// Lane intervals from per-lane lateral samples: centers at the sample mean,
/// boundaries midway between neighboring centers, outer edges mirrored.
std::vector<Lane> lanes_from_samples(const std::map<int, std::vector<double>>& by_lane) {
  struct Stat {
    int id;
    double mean, lo, hi;
  };
  std::vector<Stat> stats;
  for (const auto& [id, values] : by_lane) {
    double sum = 0.0, lo = values.front(), hi = values.front();
    for (double v : values) {
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    stats.push_back({id, sum / static_cast<double>(values.size()), lo, hi});
  }
  std::sort(stats.begin(), stats.end(),
            [](const Stat& a, const Stat& b) { return a.mean < b.mean; });

  std::vector<Lane> lanes(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    Lane& lane = lanes[i];
    lane.id = stats[i].id;
    lane.center = stats[i].mean;
    if (stats.size() == 1) {
      const double half = std::max(1.75, (stats[i].hi - stats[i].lo) / 2 + 0.5);
      lane.lower = lane.center - half;
      lane.upper = lane.center + half;
      break;
    }
    const bool has_prev = i > 0;
    const bool has_next = i + 1 < stats.size();
    const double lower_mid =
        has_prev ? (stats[i - 1].mean + stats[i].mean) / 2 : 0.0;
    const double upper_mid =
        has_next ? (stats[i].mean + stats[i + 1].mean) / 2 : 0.0;
    lane.lower = has_prev ? lower_mid : lane.center - (upper_mid - lane.center);
    lane.upper = has_next ? upper_mid : lane.center + (lane.center - lower_mid);
    if (has_prev) lanes[i].adjacent.push_back(stats[i - 1].id);
    if (has_next) lanes[i].adjacent.push_back(stats[i + 1].id);
  }
  return lanes;
}

/// Lanes between consecutive marking positions; ids follow the highD
/// top-to-bottom numbering (1 is off-road above, the median splits groups).
std::vector<Lane> lanes_from_markings(const std::vector<double>& upper,
                                      const std::vector<double>& lower) {
  std::vector<Lane> lanes;
  auto add_group = [&lanes](const std::vector<double>& marks, int first_id) {
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
      Lane lane;
      lane.id = first_id + static_cast<int>(i);
      lane.lower = marks[i];
      lane.upper = marks[i + 1];
      lane.center = (marks[i] + marks[i + 1]) / 2;
      if (i > 0) lane.adjacent.push_back(lane.id - 1);
      if (i + 2 < marks.size()) lane.adjacent.push_back(lane.id + 1);
      lanes.push_back(std::move(lane));
    }
  };
  add_group(upper, 2);
  const int upper_count =
      upper.size() > 1 ? static_cast<int>(upper.size()) - 1 : 0;
  add_group(lower, upper_count + 3);
  return lanes;
}

std::vector<double> parse_markings(const std::string& field, std::size_t row) {
  std::vector<double> marks;
  for (const std::string& part : split(field, ';'))
    if (!part.empty()) marks.push_back(parse_double(part, row));
  std::sort(marks.begin(), marks.end());
  return marks;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << content;
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

Recording load_ngsim(const std::string& path, const std::string& unit,
                     const std::string& lon_axis) {
  if (unit != "feet" && unit != "meters")
    throw InvalidInput("ngsim unit must be feet or meters");
  if (lon_axis != "local_y" && lon_axis != "local_x")
    throw InvalidInput("ngsim longitudinal axis must be local_y or local_x");

  Recording rec;
  rec.meta.source = "ngsim";
  rec.meta.frame_rate = 10.0;
  rec.meta.unit = unit;

  const Csv csv = parse_csv(read_file(path));
  if (csv.header.empty() && csv.rows.empty()) return rec;
  const int col_vehicle = csv.column("Vehicle_ID");
  const int col_frame = csv.column("Frame_ID");
  const int col_x = csv.column("Local_X");
  const int col_y = csv.column("Local_Y");
  const int col_lane = csv.column("Lane_ID");
  const int needed = std::max({col_vehicle, col_frame, col_x, col_y, col_lane});

  const double scale = unit == "feet" ? kFeetToMeters : 1.0;
  std::map<int, RawTrack> tracks;
  std::map<int, std::vector<double>> lane_samples;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::vector<std::string>& row = csv.rows[r];
    const std::size_t row_number = r + 2;  // 1-based, after the header
    if (static_cast<int>(row.size()) <= needed)
      throw ParseError("row " + std::to_string(row_number) + ": too few fields");
    const int vehicle = parse_int(row[static_cast<std::size_t>(col_vehicle)], row_number);
    const int frame = parse_int(row[static_cast<std::size_t>(col_frame)], row_number);
    const double local_x = scale * parse_double(row[static_cast<std::size_t>(col_x)], row_number);
    const double local_y = scale * parse_double(row[static_cast<std::size_t>(col_y)], row_number);
    const int lane = parse_int(row[static_cast<std::size_t>(col_lane)], row_number);

    const double lon = lon_axis == "local_y" ? local_y : local_x;
    const double lat = lon_axis == "local_y" ? local_x : local_y;

    RawTrack& track = tracks[vehicle];
    track.id = vehicle;
    if (!track.frames.empty() && frame <= track.frames.back()) {
      if (frame == track.frames.back())
        throw ParseError("row " + std::to_string(row_number) +
                         ": duplicate frame for vehicle " + std::to_string(vehicle));
      throw ParseError("row " + std::to_string(row_number) +
                       ": non-monotone frames for vehicle " + std::to_string(vehicle));
    }
    track.frames.push_back(frame);
    track.positions.emplace_back(lon, lat);
    lane_samples[lane].push_back(lat);
  }

  rec.meta.lanes = lanes_from_samples(lane_samples);
  rec.tracks.reserve(tracks.size());
  for (auto& [id, track] : tracks) rec.tracks.push_back(std::move(track));
  return rec;
}

Recording load_highd(const std::string& tracks_path,
                     const std::string& meta_path) {
  const Csv meta_csv = parse_csv(read_file(meta_path));
  if (meta_csv.rows.empty()) throw ParseError("recordingMeta has no data row");
  const int col_rate = meta_csv.column("frameRate");
  const int col_upper = meta_csv.column("upperLaneMarkings");
  const int col_lower = meta_csv.column("lowerLaneMarkings");
  const std::vector<std::string>& meta_row = meta_csv.rows.front();
  const int max_meta = std::max({col_rate, col_upper, col_lower});
  if (static_cast<int>(meta_row.size()) <= max_meta)
    throw ParseError("recordingMeta row is missing fields");

  Recording rec;
  rec.meta.source = "highd";
  rec.meta.unit = "meters";
  rec.meta.frame_rate = parse_double(meta_row[static_cast<std::size_t>(col_rate)], 2);
  if (rec.meta.frame_rate <= 0) throw ParseError("frameRate must be positive");
  const std::vector<double> upper =
      parse_markings(meta_row[static_cast<std::size_t>(col_upper)], 2);
  const std::vector<double> lower =
      parse_markings(meta_row[static_cast<std::size_t>(col_lower)], 2);
  rec.meta.lanes = lanes_from_markings(upper, lower);

  const Csv csv = parse_csv(read_file(tracks_path));
  if (csv.header.empty() && csv.rows.empty()) return rec;
  const int col_id = csv.column("id");
  const int col_frame = csv.column("frame");
  const int col_x = csv.column("x");
  const int col_y = csv.column("y");
  const int needed = std::max({col_id, col_frame, col_x, col_y});

  std::map<int, RawTrack> tracks;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::vector<std::string>& row = csv.rows[r];
    const std::size_t row_number = r + 2;
    if (static_cast<int>(row.size()) <= needed)
      throw ParseError("row " + std::to_string(row_number) + ": too few fields");
    const int vehicle = parse_int(row[static_cast<std::size_t>(col_id)], row_number);
    const int frame = parse_int(row[static_cast<std::size_t>(col_frame)], row_number);
    const double x = parse_double(row[static_cast<std::size_t>(col_x)], row_number);
    const double y = parse_double(row[static_cast<std::size_t>(col_y)], row_number);

    RawTrack& track = tracks[vehicle];
    track.id = vehicle;
    if (!track.frames.empty() && frame <= track.frames.back()) {
      if (frame == track.frames.back())
        throw ParseError("row " + std::to_string(row_number) +
                         ": duplicate frame for vehicle " + std::to_string(vehicle));
      throw ParseError("row " + std::to_string(row_number) +
                       ": non-monotone frames for vehicle " + std::to_string(vehicle));
    }
    track.frames.push_back(frame);
    track.positions.emplace_back(x, y);
  }

  // Uniform travel direction: vehicles moving toward decreasing x are
  // mirrored along the longitudinal axis.
  for (auto& [id, track] : tracks) {
    if (track.positions.size() < 2) continue;
    if (track.positions.back().x() < track.positions.front().x())
      for (Eigen::Vector2d& p : track.positions) p.x() = -p.x();
  }

  rec.tracks.reserve(tracks.size());
  for (auto& [id, track] : tracks) rec.tracks.push_back(std::move(track));
  return rec;
}

RawTrack resample(const RawTrack& track, double from_hz, double to_hz) {
  if (!(from_hz > 0) || !(to_hz > 0))
    throw InvalidInput("resample: rates must be positive");
  if (to_hz > from_hz)
    throw InvalidInput("resample: cannot upsample (to_hz > from_hz)");
  RawTrack out;
  out.id = track.id;
  if (track.frames.empty()) return out;

  const double t_first = track.frames.front() / from_hz;
  const double t_last = track.frames.back() / from_hz;
  const long j_begin = std::lround(std::ceil(t_first * to_hz - 1e-9));
  const long j_end = std::lround(std::floor(t_last * to_hz + 1e-9));

  if (track.frames.size() == 1) {
    if (j_begin <= j_end) {
      out.frames.push_back(static_cast<int>(j_begin));
      out.positions.push_back(track.positions.front());
    }
    return out;
  }

  std::size_t hi = 1;
  for (long j = j_begin; j <= j_end; ++j) {
    const double t = j / to_hz;
    while (hi + 1 < track.frames.size() && track.frames[hi] / from_hz < t) ++hi;
    const std::size_t lo = hi - 1;
    const double t_lo = track.frames[lo] / from_hz;
    const double t_hi = track.frames[hi] / from_hz;
    double alpha = (t - t_lo) / (t_hi - t_lo);
    alpha = std::clamp(alpha, 0.0, 1.0);
    out.frames.push_back(static_cast<int>(j));
    out.positions.push_back((1.0 - alpha) * track.positions[lo] +
                            alpha * track.positions[hi]);
  }
  return out;
}

Recording resample_recording(const Recording& rec, double to_hz) {
  Recording out;
  out.meta = rec.meta;
  out.meta.frame_rate = to_hz;
  out.tracks.reserve(rec.tracks.size());
  for (const RawTrack& track : rec.tracks)
    out.tracks.push_back(resample(track, rec.meta.frame_rate, to_hz));
  return out;
}

WindowBatch extract_windows(const Recording& rec, double obs_s, double pred_s,
                            double stride_s) {
  if (rec.meta.frame_rate <= 0)
    throw InvalidInput("extract_windows: frame rate must be positive");
  const double rate = rec.meta.frame_rate;
  const int n = static_cast<int>(std::lround(obs_s * rate));
  const int horizon = static_cast<int>(std::lround(pred_s * rate));
  const int total = n + horizon;
  const int stride = std::max(1, static_cast<int>(std::lround(stride_s * rate)));
  if (n < 2 || horizon < 1)
    throw InvalidInput("extract_windows: window too short");

  // frame -> index maps for cropping surrounding tracks
  std::vector<std::unordered_map<int, std::size_t>> frame_index(rec.tracks.size());
  for (std::size_t v = 0; v < rec.tracks.size(); ++v)
    for (std::size_t i = 0; i < rec.tracks[v].frames.size(); ++i)
      frame_index[v].emplace(rec.tracks[v].frames[i], i);

  WindowBatch batch;
  for (std::size_t v = 0; v < rec.tracks.size(); ++v) {
    const RawTrack& target = rec.tracks[v];
    if (target.frames.empty()) continue;
    const int first = target.frames.front();
    const int last = target.frames.back();
    for (int start = first; start + total - 1 <= last; start += stride) {
      bool complete = true;
      Track target_track;
      target_track.id = target.id;
      target_track.pos.resize(static_cast<std::size_t>(total), {0.0, 0.0});
      target_track.has.assign(static_cast<std::size_t>(total), false);
      target_track.observed.assign(static_cast<std::size_t>(total), false);
      for (int t = 1; t <= total; ++t) {
        const auto it = frame_index[v].find(start + t - 1);
        if (it == frame_index[v].end()) {
          complete = false;
          break;
        }
        const std::size_t i = static_cast<std::size_t>(t - 1);
        target_track.pos[i] = target.positions[it->second];
        target_track.has[i] = true;
        target_track.observed[i] = t <= n;
      }
      if (!complete) {
        ++batch.skipped;
        continue;
      }

      Scene scene;
      scene.id = rec.meta.source + ":" + std::to_string(target.id) + ":" +
                 std::to_string(start);
      scene.dt = 1.0 / rate;
      scene.n = n;
      scene.T = total;
      scene.lanes = rec.meta.lanes;
      scene.target = std::move(target_track);

      for (std::size_t w = 0; w < rec.tracks.size(); ++w) {
        if (w == v) continue;
        const RawTrack& other = rec.tracks[w];
        Track cropped;
        cropped.id = other.id;
        cropped.pos.resize(static_cast<std::size_t>(total), {0.0, 0.0});
        cropped.has.assign(static_cast<std::size_t>(total), false);
        cropped.observed.assign(static_cast<std::size_t>(total), false);
        bool seen_in_window = false;
        for (int t = 1; t <= total; ++t) {
          const auto it = frame_index[w].find(start + t - 1);
          if (it == frame_index[w].end()) continue;
          const std::size_t i = static_cast<std::size_t>(t - 1);
          cropped.pos[i] = other.positions[it->second];
          cropped.has[i] = true;
          cropped.observed[i] = t <= n;
          seen_in_window = seen_in_window || t <= n;
        }
        if (seen_in_window) scene.others.push_back(std::move(cropped));
      }
      batch.scenes.push_back(std::move(scene));
    }
  }
  return batch;
}

SceneArchive load_scene_archive(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scene archive: ") + e.what());
  }
  SceneArchive archive;
  if (j.is_object() && j.contains("scenes")) {
    archive.manifest = j.value("manifest", nlohmann::json::object());
    for (const nlohmann::json& js : j.at("scenes"))
      archive.scenes.push_back(scene_from_json(js));
  } else {
    // a bare Scene document counts as a one-scene archive
    archive.manifest = nlohmann::json::object();
    archive.scenes.push_back(scene_from_json(j));
  }
  return archive;
}

void save_scene_archive(const SceneArchive& archive, const std::string& path) {
  nlohmann::json scenes = nlohmann::json::array();
  for (const Scene& scene : archive.scenes)
    scenes.push_back(scene_to_json(scene));
  const nlohmann::json j{{"manifest", archive.manifest},
                         {"scenes", std::move(scenes)}};
  write_file(path, j.dump() + "\n");
}

}  // namespace kinpred
