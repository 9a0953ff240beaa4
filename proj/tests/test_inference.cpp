#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "helpers.hpp"
#include "inference.hpp"

using namespace kinpred;

namespace {

struct JointOracle {
  double log_marginal = 0.0;
  Eigen::VectorXd post_mean;
  Eigen::MatrixXd post_cov;
};

// Builds the joint Gaussian over the stacked states, conditions on the
// observed measurements in one shot. Independent of the recursive filter.
JointOracle brute_force(const AugmentedSystem& sys,
                        const std::vector<double>& obs,
                        const std::vector<bool>& mask) {
  const int d = sys.dim;
  const int L = sys.length;
  const int N = d * L;
  Eigen::VectorXd mu(N);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(N, N);
  mu.segment(0, d) = sys.prior.mean;
  sigma.block(0, 0, d, d) = sys.prior.cov;
  for (int t = 1; t < L; ++t) {
    const Eigen::MatrixXd& f = sys.F[static_cast<std::size_t>(t - 1)];
    mu.segment(t * d, d) = f * mu.segment((t - 1) * d, d) +
                           sys.c[static_cast<std::size_t>(t - 1)];
    for (int s = 0; s < t; ++s) {
      sigma.block(t * d, s * d, d, d) =
          f * sigma.block((t - 1) * d, s * d, d, d);
      sigma.block(s * d, t * d, d, d) =
          sigma.block(t * d, s * d, d, d).transpose();
    }
    sigma.block(t * d, t * d, d, d) =
        f * sigma.block((t - 1) * d, (t - 1) * d, d, d) * f.transpose() + sys.Q;
  }

  std::vector<int> observed;
  for (int t = 0; t < L; ++t) {
    if (mask[static_cast<std::size_t>(t)]) observed.push_back(t);
  }
  const int M = static_cast<int>(observed.size());

  JointOracle out;
  if (M == 0) {
    out.post_mean = mu.tail(d);
    out.post_cov = sigma.bottomRightCorner(d, d);
    return out;
  }

  Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(M, N);
  Eigen::VectorXd y(M);
  for (int i = 0; i < M; ++i) {
    hb.block(i, observed[static_cast<std::size_t>(i)] * d, 1, d) = sys.H;
    y(i) = obs[static_cast<std::size_t>(observed[static_cast<std::size_t>(i)])];
  }
  const Eigen::VectorXd resid = y - hb * mu;
  const Eigen::MatrixXd s =
      hb * sigma * hb.transpose() + sys.R * Eigen::MatrixXd::Identity(M, M);
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  REQUIRE(llt.info() == Eigen::Success);
  double logdet = 0.0;
  for (int i = 0; i < M; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  out.log_marginal = -0.5 * (M * std::log(2.0 * std::numbers::pi) + logdet +
                             resid.dot(llt.solve(resid)));

  const Eigen::MatrixXd cross =
      sigma.block((L - 1) * d, 0, d, N) * hb.transpose();
  out.post_mean = mu.tail(d) + cross * llt.solve(resid);
  out.post_cov =
      sigma.bottomRightCorner(d, d) - cross * llt.solve(cross.transpose());
  return out;
}

AugmentedSystem random_system(int dim, int length, RandomStream& rng) {
  AugmentedSystem sys;
  sys.dim = dim;
  sys.length = length;
  for (int t = 1; t < length; ++t) {
    Eigen::MatrixXd f(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        f(i, j) = (i == j ? 0.5 : 0.0) + 0.4 * rng.normal();
    sys.F.push_back(f);
    Eigen::VectorXd c(dim);
    for (int i = 0; i < dim; ++i) c(i) = rng.normal();
    sys.c.push_back(c);
  }
  Eigen::VectorXd qdiag(dim);
  for (int i = 0; i < dim; ++i)
    qdiag(i) = (rng.uniform() < 0.4) ? 0.0 : 0.2 * rng.uniform();
  sys.Q = qdiag.asDiagonal();
  sys.H = Eigen::RowVectorXd(dim);
  for (int i = 0; i < dim; ++i) sys.H(i) = rng.normal();
  sys.R = 0.05 + rng.uniform();
  Eigen::MatrixXd root(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) root(i, j) = 0.6 * rng.normal();
  sys.prior.cov = root * root.transpose();
  sys.prior.mean = Eigen::VectorXd(dim);
  for (int i = 0; i < dim; ++i) sys.prior.mean(i) = 2.0 * rng.normal();
  return sys;
}

}  // namespace

TEST_CASE("scalar conjugate update") {
  AugmentedSystem sys;
  sys.dim = 1;
  sys.length = 1;
  sys.Q = Eigen::MatrixXd::Zero(1, 1);
  sys.H = Eigen::RowVectorXd::Ones(1);
  sys.R = 1.0;
  sys.prior.mean = Eigen::VectorXd::Zero(1);
  sys.prior.cov = Eigen::MatrixXd::Ones(1, 1);

  const FilterResult res = kalman_filter(sys, {1.0}, {true});
  CHECK(res.posterior.mean(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.posterior.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  const double expect =
      -0.5 * (std::log(2.0 * std::numbers::pi * 2.0) + 0.5);
  CHECK(res.log_marginal == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("an empty mask leaves the prior untouched by data") {
  RandomStream rng(3);
  const AugmentedSystem sys = random_system(3, 6, rng);
  const std::vector<double> obs(6, 0.0);
  const FilterResult res = kalman_filter(sys, obs, std::vector<bool>(6, false));
  CHECK(res.log_marginal == 0.0);

  Eigen::VectorXd mean = sys.prior.mean;
  Eigen::MatrixXd cov = sys.prior.cov;
  for (int t = 1; t < 6; ++t) {
    mean = sys.F[t - 1] * mean + sys.c[t - 1];
    cov = sys.F[t - 1] * cov * sys.F[t - 1].transpose() + sys.Q;
  }
  CHECK((res.posterior.mean - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((res.posterior.cov - cov).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("filter agrees with the joint-Gaussian oracle") {
  RandomStream rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int dim = (trial % 2 == 0) ? 3 : 4;
    const int length = 2 + static_cast<int>(rng.uniform() * 9);
    const AugmentedSystem sys = random_system(dim, length, rng);
    std::vector<double> obs(static_cast<std::size_t>(length));
    std::vector<bool> mask(static_cast<std::size_t>(length));
    bool any = false;
    for (int t = 0; t < length; ++t) {
      obs[static_cast<std::size_t>(t)] = 3.0 * rng.normal();
      mask[static_cast<std::size_t>(t)] = rng.uniform() < 0.75;
      any = any || mask[static_cast<std::size_t>(t)];
    }
    if (!any) mask[0] = true;

    const FilterResult filt = kalman_filter(sys, obs, mask);
    const JointOracle oracle = brute_force(sys, obs, mask);

    CHECK(std::abs(filt.log_marginal - oracle.log_marginal) <=
          1e-6 * std::max(1.0, std::abs(oracle.log_marginal)));
    const double mscale = std::max(1.0, oracle.post_mean.cwiseAbs().maxCoeff());
    CHECK((filt.posterior.mean - oracle.post_mean).cwiseAbs().maxCoeff() <=
          1e-6 * mscale);
    const double cscale = std::max(1.0, oracle.post_cov.cwiseAbs().maxCoeff());
    CHECK((filt.posterior.cov - oracle.post_cov).cwiseAbs().maxCoeff() <=
          1e-6 * cscale);
  }
}

TEST_CASE("filter input validation") {
  AugmentedSystem sys;
  sys.dim = 1;
  sys.length = 2;
  sys.F = {Eigen::MatrixXd::Ones(1, 1)};
  sys.c = {Eigen::VectorXd::Zero(1)};
  sys.Q = Eigen::MatrixXd::Zero(1, 1);
  sys.H = Eigen::RowVectorXd::Ones(1);
  sys.R = 1.0;
  sys.prior.mean = Eigen::VectorXd::Zero(1);
  sys.prior.cov = Eigen::MatrixXd::Ones(1, 1);
  CHECK_THROWS_AS(kalman_filter(sys, {1.0}, {true}), InvalidInput);
  CHECK_THROWS_AS(kalman_filter(sys, {1.0, 2.0}, {true}), InvalidInput);

  AugmentedSystem degenerate = sys;
  degenerate.R = 0.0;
  degenerate.prior.cov = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(kalman_filter(degenerate, {1.0, 2.0}, {true, true}),
                  NumericError);
}

TEST_CASE("component weights") {
  const std::vector<double> w = component_weights({std::log(3.0), 0.0});
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(component_weights({-123.0}) == std::vector<double>{1.0});

  SUBCASE("shift invariance") {
    const std::vector<double> a = component_weights({-700.0, -701.0, -703.0});
    const std::vector<double> b = component_weights({3.0, 2.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
  SUBCASE("extreme magnitudes stay normalized") {
    const std::vector<double> w2 =
        component_weights({-1e9, -1e9 + 1.0, -1e9 - 40.0});
    double total = 0.0;
    for (double x : w2) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("minus infinity gets zero weight") {
    const std::vector<double> w3 = component_weights(
        {0.0, -std::numeric_limits<double>::infinity()});
    CHECK(w3[0] == 1.0);
    CHECK(w3[1] == 0.0);
  }
  CHECK_THROWS_AS(component_weights({}), InvalidInput);
  CHECK_THROWS_AS(
      component_weights({-std::numeric_limits<double>::infinity()}),
      NumericError);
}

TEST_CASE("theta sampling is exact for zero covariance") {
  GaussianBelief lon;
  lon.mean = Eigen::Vector4d(1.0, 2.0, 3.0, 4.0);
  lon.cov = Eigen::Matrix4d::Zero();
  GaussianBelief lat;
  lat.mean = Eigen::Vector3d(5.0, 6.0, 7.0);
  lat.cov = Eigen::Matrix3d::Zero();
  RandomStream rng(1);
  const Eigen::VectorXd theta = sample_theta(lon, lat, rng);
  for (int i = 0; i < 7; ++i) CHECK(theta(i) == doctest::Approx(i + 1.0));
}

TEST_CASE("theta sampling matches its moments") {
  GaussianBelief lon;
  lon.mean = Eigen::Vector4d(1.0, -2.0, 0.5, 3.0);
  Eigen::Matrix4d lon_root;
  lon_root << 0.2, 0, 0, 0,
              0.1, 0.3, 0, 0,
              0, 0, 0.4, 0,
              0.05, 0, 0.1, 0.5;
  lon.cov = lon_root * lon_root.transpose();
  GaussianBelief lat;
  lat.mean = Eigen::Vector3d(-1.0, 0.0, 3.5);
  Eigen::Matrix3d lat_root;
  lat_root << 0.3, 0, 0,
              -0.1, 0.2, 0,
              0, 0.05, 0.25;
  lat.cov = lat_root * lat_root.transpose();

  const int n_draws = 200000;
  RandomStream rng(99);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(7);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(7, 7);
  for (int i = 0; i < n_draws; ++i) {
    const Eigen::VectorXd theta = sample_theta(lon, lat, rng);
    sum += theta;
    outer += theta * theta.transpose();
  }
  const Eigen::VectorXd mean = sum / n_draws;
  const Eigen::MatrixXd cov =
      outer / n_draws - mean * mean.transpose();

  Eigen::VectorXd expect_mean(7);
  expect_mean << lon.mean, lat.mean;
  Eigen::MatrixXd expect_cov = Eigen::MatrixXd::Zero(7, 7);
  expect_cov.topLeftCorner(4, 4) = lon.cov;
  expect_cov.bottomRightCorner(3, 3) = lat.cov;

  CHECK((mean - expect_mean).cwiseAbs().maxCoeff() < 0.01);
  CHECK((cov - expect_cov).cwiseAbs().maxCoeff() < 0.01);
  // axes are sampled independently
  CHECK(cov.topRightCorner(4, 3).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("sampling consumes a fixed-length stream") {
  GaussianBelief lon;
  lon.mean = Eigen::Vector4d::Zero();
  lon.cov = Eigen::Matrix4d::Identity();
  GaussianBelief lat;
  lat.mean = Eigen::Vector3d::Zero();
  lat.cov = Eigen::Matrix3d::Identity();
  RandomStream a(7);
  RandomStream b(7);
  sample_theta(lon, lat, a);
  for (int i = 0; i < 7; ++i) b.normal();
  CHECK(a.normal() == b.normal());
}

namespace {

ComponentModel keep_component(std::optional<AxisState> leader_at_n = {}) {
  ComponentModel comp;
  comp.pair = {0, std::nullopt};
  comp.merge_steps = 0;
  if (leader_at_n.has_value()) {
    comp.pair.leader = 2;
    comp.leader_at_n = leader_at_n;
  }
  return comp;
}

}  // namespace

TEST_CASE("free-driving rollout at the desired speed is constant velocity") {
  const Scene sc = testutil::straight_scene(0.0, 25.0, 0.0);
  RunConfig cfg;
  const GainTable gains(step_matrices(sc.dt), 120);
  Eigen::VectorXd theta(7);
  theta << 72.5, 25.0, 0.0, 25.0, 0.0, 0.0, 0.0;
  RandomStream rng(5);
  const std::vector<Eigen::Vector2d> pos =
      propagate(theta, keep_component(), sc, cfg, gains, rng, false);
  REQUIRE(static_cast<int>(pos.size()) == sc.T - sc.n);
  for (int i = 0; i < sc.T - sc.n; ++i) {
    CHECK(pos[i].x() == doctest::Approx(72.5 + 2.5 * (i + 1)).epsilon(1e-12));
    CHECK(pos[i].y() == doctest::Approx(0.0));
  }
}

TEST_CASE("car-following rollout holds the equilibrium gap") {
  const Scene sc = testutil::straight_scene(0.0, 10.0, 0.0);
  RunConfig cfg;
  const GainTable gains(step_matrices(sc.dt), 120);
  Eigen::VectorXd theta(7);
  const double x_n = 10.0 * 0.1 * 29;
  theta << x_n, 10.0, 20.0, 10.0, 0.0, 0.0, 0.0;
  RandomStream rng(5);
  const std::vector<Eigen::Vector2d> pos = propagate(
      theta, keep_component(AxisState{x_n + 20.0, 10.0}), sc, cfg, gains, rng,
      false);
  for (int i = 0; i < sc.T - sc.n; ++i) {
    CHECK(pos[i].x() == doctest::Approx(x_n + 1.0 * (i + 1)).epsilon(1e-9));
  }
}

TEST_CASE("negative sampled velocities are clamped from the start") {
  const Scene sc = testutil::straight_scene(0.0, 5.0, 0.0);
  RunConfig cfg;
  const GainTable gains(step_matrices(sc.dt), 120);
  Eigen::VectorXd theta(7);
  theta << 10.0, -5.0, 0.0, -10.0, 0.0, 0.0, 0.0;
  RandomStream rng(5);
  const std::vector<Eigen::Vector2d> pos =
      propagate(theta, keep_component(), sc, cfg, gains, rng, false);
  for (const Eigen::Vector2d& p : pos) CHECK(p.x() == doctest::Approx(10.0));
}

TEST_CASE("no rollout step ever moves backwards") {
  const Scene sc = testutil::straight_scene(0.0, 5.0, 0.0);
  RunConfig cfg;
  cfg.sigma_lon = 0.3;
  cfg.sigma_lat = 0.3;
  const GainTable gains(step_matrices(sc.dt), 120);
  RandomStream rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd theta(7);
    theta << 0.0, 2.0 * rng.uniform(), 5.0 + 10.0 * rng.uniform(),
        4.0 * rng.uniform() - 2.0, 0.0, rng.normal(), 0.0;
    const std::vector<Eigen::Vector2d> pos = propagate(
        theta, keep_component(AxisState{10.0, 0.0}), sc, cfg, gains, rng, true);
    double prev = theta(0);
    for (const Eigen::Vector2d& p : pos) {
      CHECK(p.x() >= prev - 1e-12);
      prev = p.x();
    }
  }
}

TEST_CASE("merge rollouts land on the target offset mid-horizon") {
  const Scene sc = testutil::straight_scene(0.0, 25.0, 0.0);
  RunConfig cfg;
  const GainTable gains(step_matrices(sc.dt), 120);
  ComponentModel comp;
  comp.pair = {1, std::nullopt};
  comp.merge_steps = 60;  // completes at t = 61, inside n+1..T
  Eigen::VectorXd theta(7);
  theta << 72.5, 25.0, 0.0, 25.0, 1.2, 0.11, 3.5;
  RandomStream rng(5);
  const std::vector<Eigen::Vector2d> pos =
      propagate(theta, comp, sc, cfg, gains, rng, false);
  // positions run t = 31..80; the merge ends at t = 61 (index 30)
  for (int t = 61; t <= sc.T; ++t) {
    CHECK(pos[static_cast<std::size_t>(t - sc.n - 1)].y() ==
          doctest::Approx(3.5).epsilon(1e-9));
  }
}

TEST_CASE("propagate validates theta") {
  const Scene sc = testutil::straight_scene();
  RunConfig cfg;
  const GainTable gains(step_matrices(sc.dt), 120);
  RandomStream rng(1);
  Eigen::VectorXd bad(6);
  bad.setZero();
  CHECK_THROWS_AS(propagate(bad, keep_component(), sc, cfg, gains, rng, false),
                  InvalidInput);
  Eigen::VectorXd nan7 = Eigen::VectorXd::Zero(7);
  nan7(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(propagate(nan7, keep_component(), sc, cfg, gains, rng, false),
                  InvalidInput);
  ComponentModel broken = keep_component(AxisState{10.0, 0.0});
  broken.leader_at_n.reset();
  Eigen::VectorXd ok = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(propagate(ok, broken, sc, cfg, gains, rng, false),
                  InvalidInput);
}

TEST_CASE("prediction on an empty straight road keeps the lane") {
  Scene sc = testutil::straight_scene(0.0, 20.0, 0.0);
  sc.lanes = {Lane{0, -1.75, 1.75, 0.0, {}}};
  RunConfig cfg;
  cfg.n_samples = 2;
  const PredictionSet pred = predict(sc, cfg, 17);

  CHECK(pred.scene_id == sc.id);
  CHECK(pred.n == sc.n);
  CHECK(pred.T == sc.T);
  // one lane, no leaders: one pair, 25 merge durations
  REQUIRE(pred.components.size() == 25);
  double total = 0.0;
  for (const ComponentModel& c : pred.components) {
    CHECK(c.pair.lane == 0);
    CHECK_FALSE(c.pair.leader.has_value());
    total += c.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  REQUIRE(pred.samples.size() == 50);
  double sample_total = 0.0;
  for (const WeightedTrajectory& s : pred.samples) {
    REQUIRE(static_cast<int>(s.positions.size()) == sc.T - sc.n);
    sample_total += s.weight;
    for (const Eigen::Vector2d& p : s.positions) {
      // noisy rollouts random-walk around the lane center
      CHECK(std::abs(p.y()) < 4.0);
      CHECK(p.x() > 55.0);
      CHECK(p.x() < 175.0);
    }
  }
  CHECK(sample_total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a simulated merge puts most weight on the destination lane") {
  RandomStream rng(123);
  testutil::SimSpec spec;
  spec.v0 = 25.0;
  spec.v_star = 25.0;
  spec.lane_from = 0.0;
  spec.lane_to = 3.5;
  spec.merge_steps = 60;
  spec.sigma_lon = 0.05;
  spec.sigma_lat = 0.05;
  spec.obs_noise = 0.05;
  const Scene sc = testutil::simulated_scene(spec, 30, 80, 0.1, rng);

  RunConfig cfg;
  cfg.n_samples = 1;
  const PredictionSet pred = predict(sc, cfg, 7);
  double mass_on_merge = 0.0;
  for (const ComponentModel& c : pred.components) {
    if (c.pair.lane == 1) mass_on_merge += c.weight;
  }
  CHECK(mass_on_merge > 0.5);
}

TEST_CASE("a merge finishing inside the window pins its duration") {
  // with the flat post-merge tail observed, duration and offset decouple
  RandomStream rng(123);
  testutil::SimSpec spec;
  spec.v0 = 25.0;
  spec.v_star = 25.0;
  spec.lane_from = 0.0;
  spec.lane_to = 3.5;
  spec.merge_steps = 25;
  spec.sigma_lon = 0.05;
  spec.sigma_lat = 0.05;
  spec.obs_noise = 0.05;
  const Scene sc = testutil::simulated_scene(spec, 30, 80, 0.1, rng);

  RunConfig cfg;
  cfg.n_samples = 1;
  const PredictionSet pred = predict(sc, cfg, 7);
  const ComponentModel* top = &pred.components[0];
  for (const ComponentModel& c : pred.components) {
    if (c.weight > top->weight) top = &c;
  }
  CHECK(top->pair.lane == 1);
  CHECK(std::abs(top->merge_steps - 25) <= 5);
}

TEST_CASE("a simulated follower prefers the leader hypothesis") {
  RandomStream rng(321);
  testutil::SimSpec spec;
  spec.x0 = 0.0;
  spec.v0 = 22.0;
  spec.leader_x0 = 30.0;
  spec.leader_v = 18.0;
  spec.g_star = 15.0;
  spec.v_star = 18.0;
  spec.sigma_lon = 0.05;
  spec.sigma_lat = 0.05;
  spec.obs_noise = 0.05;
  const Scene sc = testutil::simulated_scene(spec, 30, 80, 0.1, rng);

  RunConfig cfg;
  cfg.n_samples = 1;
  const PredictionSet pred = predict(sc, cfg, 7);
  double with_leader = 0.0;
  double without = 0.0;
  for (const ComponentModel& c : pred.components) {
    if (c.pair.leader.has_value()) {
      with_leader += c.weight;
    } else {
      without += c.weight;
    }
  }
  CHECK(with_leader > without);
}

TEST_CASE("no-interaction mode ignores every surrounding vehicle") {
  Scene sc = testutil::straight_scene(0.0, 20.0, 0.0);
  sc.others.push_back(testutil::cv_track(2, sc.T, sc.n, 15.0, 20.0, 0.0, sc.dt));
  RunConfig cfg;
  cfg.n_samples = 1;
  cfg.no_interaction = true;
  const PredictionSet pred = predict(sc, cfg, 3);
  for (const ComponentModel& c : pred.components) {
    CHECK_FALSE(c.pair.leader.has_value());
  }
}

TEST_CASE("prediction is reproducible for a fixed seed") {
  Scene sc = testutil::straight_scene(0.0, 20.0, 3.5);
  sc.others.push_back(testutil::cv_track(2, sc.T, sc.n, 25.0, 19.0, 3.5, sc.dt));
  RunConfig cfg;
  cfg.n_samples = 3;
  const PredictionSet a = predict(sc, cfg, 42);
  const PredictionSet b = predict(sc, cfg, 42);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    REQUIRE(a.samples[i].positions.size() == b.samples[i].positions.size());
    for (std::size_t t = 0; t < a.samples[i].positions.size(); ++t) {
      CHECK(a.samples[i].positions[t] == b.samples[i].positions[t]);
    }
  }

  const PredictionSet c = predict(sc, cfg, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.samples.size() && !any_diff; ++i) {
    for (std::size_t t = 0; t < a.samples[i].positions.size(); ++t) {
      if (a.samples[i].positions[t] != c.samples[i].positions[t]) {
        any_diff = true;
        break;
      }
    }
  }
  CHECK(any_diff);
}

TEST_CASE("prediction JSON round trip") {
  Scene sc = testutil::straight_scene(0.0, 20.0, 0.0);
  RunConfig cfg;
  cfg.n_samples = 2;
  const PredictionSet pred = predict(sc, cfg, 5);
  const nlohmann::json j = prediction_to_json(pred);
  const PredictionSet back = prediction_from_json(j);

  CHECK(back.scene_id == pred.scene_id);
  CHECK(back.n == pred.n);
  CHECK(back.T == pred.T);
  REQUIRE(back.components.size() == pred.components.size());
  for (std::size_t i = 0; i < pred.components.size(); ++i) {
    CHECK(back.components[i].pair == pred.components[i].pair);
    CHECK(back.components[i].k_seconds == pred.components[i].k_seconds);
    CHECK(back.components[i].log_marginal == pred.components[i].log_marginal);
    CHECK(back.components[i].weight == pred.components[i].weight);
  }
  REQUIRE(back.samples.size() == pred.samples.size());
  for (std::size_t i = 0; i < pred.samples.size(); ++i) {
    CHECK(back.samples[i].weight == pred.samples[i].weight);
    REQUIRE(back.samples[i].positions.size() == pred.samples[i].positions.size());
    for (std::size_t t = 0; t < pred.samples[i].positions.size(); ++t) {
      CHECK(back.samples[i].positions[t] == pred.samples[i].positions[t]);
    }
  }

  CHECK_THROWS_AS(prediction_from_json(nlohmann::json{{"scene", "x"}}),
                  ParseError);
}
