#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kinpred {

/// Position/velocity along one road axis (longitudinal or lateral), in meters
/// and meters/second.
struct AxisState {
  double position = 0.0;
  double velocity = 0.0;
};

/// Discrete double-integrator step: x(t+1) = A x(t) + B u(t), with
/// A = [[1, dt], [0, 1]] and B = [0, 1]^T. The input acts directly on the
/// velocity component, once per step.
struct StepMatrices {
  double dt = 0.0;
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
};

/// Builds the step matrices for a timestep. Rejects dt <= 0.
StepMatrices step_matrices(double dt);

/// First-input gains of the minimum-norm reachability problem:
/// u0 = state_gain * x0 + target_gain * xf.
struct FirstInputGains {
  Eigen::RowVector2d state_gain;
  Eigen::RowVector2d target_gain;
};

/// Control sequence of least squared magnitude that steers x0 to xf in
/// exactly k steps under the noiseless double integrator:
///   u = C^T (C C^T)^{-1} (xf - A^k x0),  C = [A^{k-1}B, ..., AB, B].
/// C C^T is provably nonsingular for k >= 2; k < 2 is rejected.
std::vector<double> min_norm_control(const AxisState& x0, const AxisState& xf,
                                     int k, const StepMatrices& m);

/// Gains reproducing the first element of min_norm_control as a linear
/// function of (x0, xf). state_gain = -target_gain * A^k.
FirstInputGains first_input_gains(int k, const StepMatrices& m);

/// Constant-velocity rollout x(t+1) = A x(t). Returns steps+1 states, the
/// first being x0 itself.
std::vector<AxisState> propagate_zero_control(const AxisState& x0, int steps,
                                              const StepMatrices& m);

/// First-input gains for every horizon 2..max_horizon, computed once.
/// Inference evaluates the control laws in a tight loop over a small set of
/// horizons; the table is immutable after construction and safe to share
/// across threads.
class GainTable {
 public:
  GainTable(const StepMatrices& m, int max_horizon);

  const FirstInputGains& at(int horizon) const;
  const StepMatrices& mats() const { return mats_; }
  int max_horizon() const { return static_cast<int>(gains_.size()) + 1; }

 private:
  StepMatrices mats_;
  std::vector<FirstInputGains> gains_;  // index = horizon - 2
};

}  // namespace kinpred
