#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "danc/controllers.hpp"
#include "danc/error.hpp"
#include "danc/plant.hpp"
#include "danc/rbf_net.hpp"
#include "danc/scenario.hpp"
#include "danc/trajectory.hpp"

namespace danc {

/// Any state component above this magnitude aborts the run.
inline constexpr double kBlowupThreshold = 1e9;

/// One classical Runge-Kutta step. Throws NumericBlowupError carrying
/// `step_index` if any stage derivative is non-finite.
template <class Deriv>
Eigen::VectorXd rk4_step(const Deriv& deriv, const Eigen::VectorXd& state,
                         double t, double h, std::size_t step_index = 0) {
  if (!(h > 0.0)) throw PreconditionError("rk4_step needs h > 0");
  auto checked = [&](const Eigen::VectorXd& k) -> const Eigen::VectorXd& {
    if (!k.allFinite()) {
      throw NumericBlowupError("non-finite derivative at step " +
                                   std::to_string(step_index),
                               step_index);
    }
    return k;
  };
  const Eigen::VectorXd k1 = checked(deriv(t, state));
  const Eigen::VectorXd k2 = checked(deriv(t + 0.5 * h, state + 0.5 * h * k1));
  const Eigen::VectorXd k3 = checked(deriv(t + 0.5 * h, state + 0.5 * h * k2));
  const Eigen::VectorXd k4 = checked(deriv(t + h, state + h * k3));
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Column-oriented run log. Scalar signals live in named columns; the weight
/// vectors are kept per row for the analysis module.
class SimTrace {
 public:
  SimTrace() = default;
  explicit SimTrace(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  bool has_column(const std::string& name) const;

  /// Throws TraceFormatError naming the available columns.
  const std::vector<double>& column(const std::string& name) const;

  void append_row(const std::vector<double>& values);

  std::vector<Eigen::VectorXd> w_f;  // one per row, possibly empty
  std::vector<Eigen::VectorXd> w_g;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// Everything a run needs, derived once from a validated scenario.
struct ClosedLoopSetup {
  Scenario scenario;
  PlantModel plant;
  DesiredTrajectory traj;
  ErrorTrajectoryPlan plan;
  RbfNetwork net;  // shared basis for the f and g approximators
  ControllerGains gains;
  std::optional<BasisTable> basis_table;
  std::size_t steps = 0;
  std::size_t delay = 0;
};

/// Validates the scenario and assembles plant, reference, centers, and gains.
/// Throws ConfigError on invalid input.
ClosedLoopSetup build_setup(const Scenario& scenario);

/// Signals at one instant, computed from (t, x) and the controller state.
struct Observation {
  Eigen::VectorXd x_d;
  Eigen::VectorXd e;
  double ef = 0.0;
  double ef_star = 0.0;
  double def_star = 0.0;
  double et = 0.0;
  double nu = 0.0;
  double e_norm = 0.0;
  double lf_b = 0.0;
  double lg_b = 0.0;
  double hbar_f = 0.0;
  double hbar_g = 0.0;
  Eigen::VectorXd s;  // basis at x_d (never at x)
};

Observation observe(const ClosedLoopSetup& setup, double t, const Eigen::VectorXd& x);

enum class RunStatus { kCompleted, kNumericBlowup, kGainSign };

struct SimResult {
  SimTrace trace;
  RunStatus status = RunStatus::kCompleted;
  std::string diagnostic;
  std::size_t abort_step = 0;
  double max_incremental_residual = 0.0;  // schemes B and C
  double max_basis_audit_error = 0.0;     // |S used - S(x_d(t))|

  bool completed() const { return status == RunStatus::kCompleted; }
};

/// Fixed-step closed-loop run over [0, horizon] with t_k = k h. Scheme A
/// integrates the weights with the plant; schemes B and C update the
/// estimates algebraically once per step and hold u over the step. Aborts
/// keep the partial trace.
SimResult run_closed_loop(const ClosedLoopSetup& setup);
SimResult run_closed_loop(const Scenario& scenario);

/// CSV with a header row and %.12e numerics. When verbose, the weight
/// vectors are written as wf_1.., wg_1.. columns.
void write_trace_csv(const SimTrace& trace, const std::string& path, bool verbose);
std::string trace_csv(const SimTrace& trace, bool verbose);

/// Reads a CSV written by write_trace_csv (weight columns stay plain
/// columns). Throws TraceFormatError on malformed input.
SimTrace read_trace_csv(const std::string& path);

}  // namespace danc
