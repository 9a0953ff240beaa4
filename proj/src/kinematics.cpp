#include "kinematics.hpp"

#include <cmath>

#include "errors.hpp"

namespace kinpred {

namespace {

Eigen::Matrix2d power_of_a(int k, double dt) {
  // A^k = [[1, k*dt], [0, 1]]
  Eigen::Matrix2d ak;
  ak << 1.0, k * dt, 0.0, 1.0;
  return ak;
}

// Inverse of C C^T for the double integrator. With columns A^m B = (m*dt, 1)^T
// over m = 0..k-1:
//   C C^T = [[dt^2 * S2, dt * S1], [dt * S1, k]],
//   S1 = sum m, S2 = sum m^2, det = dt^2 * k^2 (k^2 - 1) / 12 > 0 for k >= 2.
Eigen::Matrix2d gram_inverse(int k, double dt) {
  const double kd = static_cast<double>(k);
  const double s1 = kd * (kd - 1.0) / 2.0;
  const double s2 = (kd - 1.0) * kd * (2.0 * kd - 1.0) / 6.0;
  Eigen::Matrix2d gram;
  gram << dt * dt * s2, dt * s1, dt * s1, kd;
  const double det = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
  if (!(det > 1e-300) || !std::isfinite(det)) {
    throw NumericError("min-norm Gram matrix is singular");
  }
  Eigen::Matrix2d inv;
  inv << gram(1, 1), -gram(0, 1), -gram(1, 0), gram(0, 0);
  inv /= det;
  return inv;
}

}  // namespace

StepMatrices step_matrices(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidInput("timestep must be positive and finite");
  }
  StepMatrices m;
  m.dt = dt;
  m.A << 1.0, dt, 0.0, 1.0;
  m.B << 0.0, 1.0;
  return m;
}

std::vector<double> min_norm_control(const AxisState& x0, const AxisState& xf,
                                     int k, const StepMatrices& m) {
  if (k < 2) {
    throw InvalidInput("min-norm horizon must be at least 2 steps");
  }
  const Eigen::Matrix2d gram_inv = gram_inverse(k, m.dt);
  const Eigen::Vector2d start(x0.position, x0.velocity);
  const Eigen::Vector2d target(xf.position, xf.velocity);
  const Eigen::Vector2d residual = target - power_of_a(k, m.dt) * start;
  const Eigen::Vector2d lambda = gram_inv * residual;

  std::vector<double> u(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    // column i of C is A^{k-1-i} B = ((k-1-i)*dt, 1)^T
    const double col_p = (k - 1 - i) * m.dt;
    u[static_cast<std::size_t>(i)] = col_p * lambda(0) + lambda(1);
  }
  return u;
}

FirstInputGains first_input_gains(int k, const StepMatrices& m) {
  if (k < 2) {
    throw InvalidInput("min-norm horizon must be at least 2 steps");
  }
  const Eigen::Matrix2d gram_inv = gram_inverse(k, m.dt);
  Eigen::RowVector2d first_col;
  first_col << (k - 1) * m.dt, 1.0;
  FirstInputGains g;
  g.target_gain = first_col * gram_inv;
  g.state_gain = -g.target_gain * power_of_a(k, m.dt);
  return g;
}

std::vector<AxisState> propagate_zero_control(const AxisState& x0, int steps,
                                              const StepMatrices& m) {
  if (steps < 0) {
    throw InvalidInput("step count must be nonnegative");
  }
  std::vector<AxisState> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  states.push_back(x0);
  AxisState x = x0;
  for (int i = 0; i < steps; ++i) {
    x.position += m.dt * x.velocity;
    states.push_back(x);
  }
  return states;
}

GainTable::GainTable(const StepMatrices& m, int max_horizon) : mats_(m) {
  if (max_horizon < 2) {
    throw InvalidInput("gain table needs max horizon >= 2");
  }
  gains_.reserve(static_cast<std::size_t>(max_horizon) - 1);
  for (int k = 2; k <= max_horizon; ++k) {
    gains_.push_back(first_input_gains(k, m));
  }
}

const FirstInputGains& GainTable::at(int horizon) const {
  if (horizon < 2 || horizon > max_horizon()) {
    throw InvalidInput("horizon outside gain table range");
  }
  return gains_[static_cast<std::size_t>(horizon) - 2];
}

}  // namespace kinpred
