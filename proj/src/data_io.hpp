#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "scene.hpp"

namespace kinpred {

struct RecordingMeta {
  std::string source;  ///< ngsim | highd | synthetic
  double frame_rate = 10.0;
  std::string unit = "meters";  ///< unit of the source file before conversion
  std::vector<Lane> lanes;
};

/// One vehicle over the recording clock. Frames are strictly increasing and
/// shared across vehicles (frame f happens at f / frame_rate seconds).
struct RawTrack {
  int id = 0;
  std::vector<int> frames;
  std::vector<Eigen::Vector2d> positions;  ///< meters, (longitudinal, lateral)
};

struct Recording {
  RecordingMeta meta;
  std::vector<RawTrack> tracks;
};

/// NGSIM export: columns Vehicle_ID, Frame_ID, Local_X, Local_Y, Lane_ID.
/// Positions convert feet to meters when unit == "feet"; lon_axis selects
/// which local axis runs along the road ("local_y" or "local_x"). Lane
/// intervals derive from the per-Lane_ID lateral extents. An empty file
/// yields an empty recording.
Recording load_ngsim(const std::string& path, const std::string& unit = "feet",
                     const std::string& lon_axis = "local_y");

/// highD pair: tracks CSV (id, frame, x, y, laneId, ...) plus recordingMeta
/// CSV (frameRate, upperLaneMarkings, lowerLaneMarkings). Lane intervals come
/// from the marking positions; vehicles driving toward decreasing x get their
/// longitudinal coordinate mirrored so travel direction is uniform.
Recording load_highd(const std::string& tracks_path,
                     const std::string& meta_path);

/// Linear interpolation onto the uniform to_hz grid sharing the recording's
/// time origin, covering the track's span. Rejects to_hz > from_hz.
RawTrack resample(const RawTrack& track, double from_hz, double to_hz);

/// Resamples every track to to_hz and rewrites the meta frame rate.
Recording resample_recording(const Recording& rec, double to_hz);

struct WindowBatch {
  std::vector<Scene> scenes;
  int skipped = 0;  ///< windows dropped because the target had a gap
};

/// Slides a window along every track in target role: n = obs_s * rate
/// observed steps followed by pred_s * rate future steps, advancing by
/// stride_s. The target must cover the whole window; surrounding tracks are
/// cropped and keep partial masks.
WindowBatch extract_windows(const Recording& rec, double obs_s, double pred_s,
                            double stride_s);

struct SceneArchive {
  nlohmann::json manifest;
  std::vector<Scene> scenes;
};

SceneArchive load_scene_archive(const std::string& path);
void save_scene_archive(const SceneArchive& archive, const std::string& path);

/// Reads a whole file; throws InvalidInput when unreadable.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace kinpred
