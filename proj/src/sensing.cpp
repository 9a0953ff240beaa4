#include "sensing.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace kinpred {

bool occluded(const Eigen::Vector2d& ego, const Eigen::Vector2d& subject,
              const std::vector<Eigen::Vector2d>& obstacles, double radius) {
  const Eigen::Vector2d seg = subject - ego;
  const double seg_len2 = seg.squaredNorm();
  for (const Eigen::Vector2d& obstacle : obstacles) {
    double t = 0.0;
    if (seg_len2 > 0.0) {
      t = std::clamp(seg.dot(obstacle - ego) / seg_len2, 0.0, 1.0);
    }
    const Eigen::Vector2d closest = ego + t * seg;
    if ((obstacle - closest).norm() < radius) return true;
  }
  return false;
}

Scene driver_view(const Scene& scene, int ego_id, const SensorConfig& config) {
  const Track* ego = nullptr;
  if (scene.target.id == ego_id) {
    ego = &scene.target;
  } else {
    ego = scene.other_by_id(ego_id);
  }
  if (ego == nullptr) throw InvalidInput("driver_view: unknown ego id");

  Scene degraded = scene;
  const int min_frames =
      static_cast<int>(std::round(config.min_obs_s / scene.dt));

  auto degrade = [&](Track& track) {
    int visible_count = 0;
    for (int t = 1; t <= scene.n; ++t) {
      const std::size_t i = static_cast<std::size_t>(t - 1);
      if (!track.observed[i]) continue;
      bool visible = ego->has_at(t);
      if (visible) {
        const double gap = std::abs(track.at(t).x() - ego->at(t).x());
        visible = gap <= config.range_lon;
      }
      if (visible) {
        std::vector<Eigen::Vector2d> obstacles;
        for (const Track& blocker : scene.others) {
          if (blocker.id == track.id || blocker.id == ego->id) continue;
          if (blocker.has_at(t)) obstacles.push_back(blocker.at(t));
        }
        if (scene.target.id != track.id && scene.target.id != ego->id &&
            scene.target.has_at(t)) {
          obstacles.push_back(scene.target.at(t));
        }
        visible = !occluded(ego->at(t), track.at(t), obstacles,
                            config.obstacle_radius);
      }
      if (visible) {
        ++visible_count;
      } else {
        track.observed[i] = false;
      }
    }
    return visible_count;
  };

  std::vector<Track> kept;
  kept.reserve(degraded.others.size());
  for (Track& track : degraded.others) {
    if (track.id == ego_id) {
      kept.push_back(std::move(track));
      continue;
    }
    if (degrade(track) >= min_frames) kept.push_back(std::move(track));
  }
  degraded.others = std::move(kept);
  if (degraded.target.id != ego_id) degrade(degraded.target);
  return degraded;
}

std::vector<AxisState> smooth_track_cv(const std::vector<double>& positions,
                                       const std::vector<bool>& mask, double dt,
                                       double sigma_process, double sigma_obs) {
  const std::size_t n = positions.size();
  if (mask.size() != n) throw InvalidInput("smoother: mask length mismatch");
  if (!(dt > 0.0)) throw InvalidInput("smoother: dt must be positive");
  std::size_t first_obs = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (mask[t]) {
      first_obs = t;
      break;
    }
  }
  if (first_obs == n) throw InvalidInput("smoother: no observed samples");

  Eigen::Matrix2d f;
  f << 1.0, dt, 0.0, 1.0;
  Eigen::Matrix2d q = Eigen::Matrix2d::Zero();
  q(1, 1) = sigma_process * sigma_process;
  const double r = sigma_obs * sigma_obs;

  // diffuse prior anchored at the first observed position
  Eigen::Vector2d mean(positions[first_obs], 0.0);
  Eigen::Matrix2d cov = Eigen::Vector2d(1e4, 1e3).asDiagonal();

  std::vector<Eigen::Vector2d> filt_mean(n), pred_mean(n);
  std::vector<Eigen::Matrix2d> filt_cov(n), pred_cov(n);

  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      mean = f * mean;
      cov = f * cov * f.transpose() + q;
    }
    pred_mean[t] = mean;
    pred_cov[t] = cov;
    if (mask[t]) {
      const double innovation = positions[t] - mean(0);
      const double s = cov(0, 0) + r;
      const Eigen::Vector2d gain = cov.col(0) / s;
      mean += gain * innovation;
      cov -= gain * cov.row(0);
      cov = 0.5 * (cov + cov.transpose().eval());
    }
    filt_mean[t] = mean;
    filt_cov[t] = cov;
  }

  // Rauch-Tung-Striebel backward pass
  std::vector<Eigen::Vector2d> smooth_mean(n);
  smooth_mean[n - 1] = filt_mean[n - 1];
  Eigen::Matrix2d smooth_cov = filt_cov[n - 1];
  for (std::size_t t = n - 1; t-- > 0;) {
    const Eigen::Matrix2d gain =
        filt_cov[t] * f.transpose() * pred_cov[t + 1].inverse();
    smooth_mean[t] = filt_mean[t] + gain * (smooth_mean[t + 1] - pred_mean[t + 1]);
    smooth_cov =
        filt_cov[t] + gain * (smooth_cov - pred_cov[t + 1]) * gain.transpose();
  }

  std::vector<AxisState> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = {smooth_mean[t](0), smooth_mean[t](1)};
  }
  return out;
}

std::vector<AxisState> smooth_longitudinal(const Track& track, int n, double dt,
                                           double sigma_process, double sigma_obs) {
  std::vector<double> positions(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (int t = 1; t <= n; ++t) {
    if (track.observed_at(t)) {
      positions[static_cast<std::size_t>(t - 1)] = track.at(t).x();
      mask[static_cast<std::size_t>(t - 1)] = true;
    }
  }
  return smooth_track_cv(positions, mask, dt, sigma_process, sigma_obs);
}

}  // namespace kinpred
