#pragma once

// Shared fixture builders for the test suite.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "behavior.hpp"
#include "config.hpp"
#include "rng.hpp"
#include "scene.hpp"

namespace testutil {

// Three parallel lanes of width 3.5 m centered at 0, 3.5 and 7.
inline std::vector<kinpred::Lane> three_lanes() {
  std::vector<kinpred::Lane> lanes(3);
  lanes[0] = {0, -1.75, 1.75, 0.0, {1}};
  lanes[1] = {1, 1.75, 5.25, 3.5, {0, 2}};
  lanes[2] = {2, 5.25, 8.75, 7.0, {1}};
  return lanes;
}

// Constant-velocity track over the full scene span, observed through n.
inline kinpred::Track cv_track(int id, int length, int n, double x0,
                               double vx, double y, double dt) {
  kinpred::Track tr;
  tr.id = id;
  tr.pos.reserve(length);
  for (int t = 0; t < length; ++t) {
    tr.pos.emplace_back(x0 + vx * dt * t, y);
    tr.has.push_back(true);
    tr.observed.push_back(t < n);
  }
  return tr;
}

// Minimal valid scene: target driving straight along the given lane center.
inline kinpred::Scene straight_scene(double x0 = 0.0, double vx = 25.0,
                                     double y = 0.0, int n = 30, int T = 80,
                                     double dt = 0.1) {
  kinpred::Scene sc;
  sc.id = "test:1:0";
  sc.dt = dt;
  sc.n = n;
  sc.T = T;
  sc.lanes = three_lanes();
  sc.target = cv_track(1, T, n, x0, vx, y, dt);
  return sc;
}

struct SimSpec {
  double x0 = 0.0;
  double v0 = 25.0;
  double lane_from = 0.0;
  double lane_to = 0.0;
  int merge_steps = 0;
  std::optional<double> leader_x0;
  double leader_v = 0.0;
  double g_star = 20.0;
  double v_star = 25.0;
  double sigma_lon = 0.0;
  double sigma_lat = 0.0;
  double obs_noise = 0.0;
};

// Rolls the target forward under the model's own control laws, so that
// inference on the result should concentrate on the generating component.
inline kinpred::Scene simulated_scene(const SimSpec& spec, int n, int T,
                                      double dt, kinpred::RandomStream& rng) {
  const int ks = 100;
  const int kc = 100;
  kinpred::GainTable gains(kinpred::step_matrices(dt),
                           std::max({ks, kc, spec.merge_steps, 2}));

  kinpred::Scene sc;
  sc.id = "sim:1:0";
  sc.dt = dt;
  sc.n = n;
  sc.T = T;
  sc.lanes = three_lanes();

  kinpred::AxisState lon{spec.x0, spec.v0};
  kinpred::AxisState lat{spec.lane_from, 0.0};
  kinpred::AxisState lead{spec.leader_x0.value_or(0.0), spec.leader_v};

  kinpred::Track target;
  target.id = 1;
  for (int t = 1; t <= T; ++t) {
    target.pos.emplace_back(lon.position + spec.obs_noise * rng.normal(),
                            lat.position + spec.obs_noise * rng.normal());
    target.has.push_back(true);
    target.observed.push_back(t <= n);
    if (t == T) break;
    double u_lon;
    if (spec.leader_x0) {
      u_lon = kinpred::lon_control(lon, spec.g_star, spec.v_star, lead, kc,
                                   gains);
    } else {
      u_lon = kinpred::lon_control_no_lead(lon.velocity, spec.v_star, kc);
    }
    const double u_lat = kinpred::lat_rollout_control(
        lat, spec.lane_to, spec.merge_steps, t - 1, ks, gains);
    const double eps_lon = spec.sigma_lon * rng.normal();
    const double eps_lat = spec.sigma_lat * rng.normal();
    lon = {lon.position + dt * lon.velocity,
           std::max(lon.velocity + u_lon + eps_lon, 0.0)};
    lat = {lat.position + dt * lat.velocity, lat.velocity + u_lat + eps_lat};
    lead = {lead.position + dt * lead.velocity, lead.velocity};
  }
  sc.target = target;

  if (spec.leader_x0) {
    sc.others.push_back(cv_track(2, T, n, *spec.leader_x0, spec.leader_v,
                                 spec.lane_to, dt));
  }
  return sc;
}

}  // namespace testutil
