#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "danc/trajectory.hpp"

namespace danc {

/// Input to a network. Under desired approximation the network only ever
/// sees the desired state x_d, never the plant state; the wrapper makes the
/// call sites say which one they pass.
struct DesiredState {
  Eigen::VectorXd value;
};

/// Gaussian RBF network, S_i(z) = exp(-|z - c_i|^2 / w_i^2).
class RbfNetwork {
 public:
  RbfNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths);

  Eigen::Index size() const { return centers_.rows(); }
  Eigen::Index input_dim() const { return centers_.cols(); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const Eigen::VectorXd& widths() const { return widths_; }

  const Eigen::VectorXd& weights() const { return weights_; }
  void set_weights(Eigen::VectorXd weights);

  /// Basis vector at a raw input point (used by offline fits).
  Eigen::VectorXd basis_at(const Eigen::VectorXd& z) const;

 private:
  Eigen::MatrixXd centers_;  // N x n
  Eigen::VectorXd widths_;
  Eigen::VectorXd weights_;
};

Eigen::VectorXd eval_basis(const RbfNetwork& net, const DesiredState& x_d);

double network_output(const Eigen::VectorXd& weights, const Eigen::VectorXd& s);
double network_output(const RbfNetwork& net, const Eigen::VectorXd& s);

struct CenterGrid {
  Eigen::MatrixXd centers;
  Eigen::VectorXd widths;
};

/// Smallest width handed out when every axis of the box is degenerate.
inline constexpr double kWidthFloor = 1e-3;

/// Regular grid over the box inflated by 10% of its extent (5% per side).
/// Degenerate axes contribute a single coordinate. Widths are the coarsest
/// non-degenerate axis spacing, so neighbours overlap along every axis of an
/// anisotropic box; floored at kWidthFloor.
CenterGrid place_centers_grid(const std::vector<double>& lo,
                              const std::vector<double>& hi, int per_axis);

/// Grid over the x_d part (first n derivatives) of the reference box.
CenterGrid place_centers_grid(const DerivativeBox& box, int order,
                              int per_axis);

struct IdealFit {
  Eigen::VectorXd w_star;
  double eps_bar = 0.0;
  Eigen::VectorXd residuals;  // per fit sample
  std::vector<double> sample_times;
};

using TargetFunction = std::function<double(const Eigen::VectorXd&)>;

inline constexpr double kDefaultRidge = 1e-10;

/// Ridge least squares over arbitrary input samples (rows of `inputs`).
/// Normal equations are scaled by the sample count, so the ridge acts on the
/// mean-square residual. eps_bar is the max absolute residual.
IdealFit fit_least_squares(const TargetFunction& target,
                           const Eigen::MatrixXd& inputs,
                           const RbfNetwork& net, double ridge = kDefaultRidge);

/// Ideal weights W* for target(x_d) sampled along the reference at
/// t_k = k * grid_step over [0, horizon].
IdealFit fit_ideal_weights(const TargetFunction& target,
                           const DesiredTrajectory& traj, const RbfNetwork& net,
                           double grid_step, double ridge = kDefaultRidge);

/// Basis values at t_k = k * step / 2 (whole and half steps), so the RK4
/// substeps of a fixed-step run can look them up instead of recomputing.
class BasisTable {
 public:
  BasisTable(const RbfNetwork& net, const DesiredTrajectory& traj, double step,
             std::size_t steps);

  /// Returns nullptr when t is not on the half-step grid.
  const Eigen::VectorXd* lookup(double t) const;

 private:
  double half_step_;
  std::vector<Eigen::VectorXd> rows_;
};

}  // namespace danc
