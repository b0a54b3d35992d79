#include "danc/rbf_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "danc/error.hpp"

namespace danc {

RbfNetwork::RbfNetwork(Eigen::MatrixXd centers, Eigen::VectorXd widths)
    : centers_(std::move(centers)), widths_(std::move(widths)) {
  if (centers_.rows() < 1) throw ShapeError("RBF network needs N >= 1 nodes");
  require_same_size(static_cast<std::size_t>(centers_.rows()),
                    static_cast<std::size_t>(widths_.size()), "RBF widths");
  if ((widths_.array() <= 0.0).any()) {
    throw ConfigError("RBF widths must be strictly positive");
  }
  weights_ = Eigen::VectorXd::Zero(centers_.rows());
}

void RbfNetwork::set_weights(Eigen::VectorXd weights) {
  require_same_size(static_cast<std::size_t>(weights.size()),
                    static_cast<std::size_t>(size()), "RBF weights");
  weights_ = std::move(weights);
}

Eigen::VectorXd RbfNetwork::basis_at(const Eigen::VectorXd& z) const {
  require_same_size(static_cast<std::size_t>(z.size()),
                    static_cast<std::size_t>(input_dim()), "RBF input");
  Eigen::VectorXd s(size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    const double d2 = (centers_.row(i).transpose() - z).squaredNorm();
    s[i] = std::exp(-d2 / (widths_[i] * widths_[i]));
  }
  return s;
}

Eigen::VectorXd eval_basis(const RbfNetwork& net, const DesiredState& x_d) {
  return net.basis_at(x_d.value);
}

double network_output(const Eigen::VectorXd& weights, const Eigen::VectorXd& s) {
  require_same_size(static_cast<std::size_t>(weights.size()),
                    static_cast<std::size_t>(s.size()), "network output");
  return weights.dot(s);
}

double network_output(const RbfNetwork& net, const Eigen::VectorXd& s) {
  return network_output(net.weights(), s);
}

CenterGrid place_centers_grid(const std::vector<double>& lo,
                              const std::vector<double>& hi, int per_axis) {
  if (per_axis < 2) throw ConfigError("per_axis must be >= 2");
  require_same_size(lo.size(), hi.size(), "center box");
  if (lo.empty()) throw ShapeError("center box has no axes");

  std::vector<std::vector<double>> axes(lo.size());
  double spacing = 0.0;
  bool any_spacing = false;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    const double extent = hi[a] - lo[a];
    if (extent < 0.0) throw ConfigError("center box has lo > hi");
    if (extent == 0.0) {
      axes[a] = {lo[a]};
      continue;
    }
    const double start = lo[a] - 0.05 * extent;
    const double step = 1.1 * extent / (per_axis - 1);
    for (int k = 0; k < per_axis; ++k) axes[a].push_back(start + k * step);
    spacing = any_spacing ? std::max(spacing, step) : step;
    any_spacing = true;
  }
  const double width = std::max(any_spacing ? spacing : 0.0, kWidthFloor);

  std::size_t count = 1;
  for (const auto& axis : axes) count *= axis.size();
  CenterGrid grid;
  grid.centers.resize(static_cast<Eigen::Index>(count),
                      static_cast<Eigen::Index>(lo.size()));
  grid.widths = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(count), width);
  // Last axis varies fastest.
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = lo.size(); a-- > 0;) {
      const auto& axis = axes[a];
      grid.centers(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(a)) =
          axis[rem % axis.size()];
      rem /= axis.size();
    }
  }
  return grid;
}

CenterGrid place_centers_grid(const DerivativeBox& box, int order,
                              int per_axis) {
  const auto n = static_cast<std::size_t>(order);
  if (box.lo.size() < n) throw ShapeError("derivative box shorter than order");
  return place_centers_grid(
      std::vector<double>(box.lo.begin(), box.lo.begin() + order),
      std::vector<double>(box.hi.begin(), box.hi.begin() + order), per_axis);
}

IdealFit fit_least_squares(const TargetFunction& target,
                           const Eigen::MatrixXd& inputs, const RbfNetwork& net,
                           double ridge) {
  const Eigen::Index samples = inputs.rows();
  const Eigen::Index nodes = net.size();
  if (samples < nodes) {
    throw FitError("fit needs at least N = " + std::to_string(nodes) +
                   " samples, got " + std::to_string(samples));
  }
  Eigen::MatrixXd phi(samples, nodes);
  Eigen::VectorXd y(samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const Eigen::VectorXd z = inputs.row(k).transpose();
    phi.row(k) = net.basis_at(z).transpose();
    y[k] = target(z);
  }
  const double scale = 1.0 / static_cast<double>(samples);
  Eigen::MatrixXd normal = scale * (phi.transpose() * phi);
  normal.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = scale * (phi.transpose() * y);

  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw FitError("normal matrix factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  if (d.minCoeff() <= 0.0 ||
      d.minCoeff() < 1e-15 * std::max(1.0, d.maxCoeff())) {
    throw FitError("normal matrix is singular or ill-conditioned after ridge");
  }

  IdealFit fit;
  fit.w_star = ldlt.solve(rhs);
  if (!fit.w_star.allFinite()) throw FitError("fit produced non-finite weights");
  fit.residuals = y - phi * fit.w_star;
  fit.eps_bar = fit.residuals.cwiseAbs().maxCoeff();
  return fit;
}

IdealFit fit_ideal_weights(const TargetFunction& target,
                           const DesiredTrajectory& traj, const RbfNetwork& net,
                           double grid_step, double ridge) {
  if (!(grid_step > 0.0)) throw ConfigError("fit grid step must be > 0");
  const auto steps =
      static_cast<Eigen::Index>(std::floor(traj.horizon() / grid_step + 1e-9));
  Eigen::MatrixXd inputs(steps + 1, traj.order());
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(steps + 1));
  for (Eigen::Index k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    inputs.row(k) = traj.desired_state(t).transpose();
    times.push_back(t);
  }
  IdealFit fit = fit_least_squares(target, inputs, net, ridge);
  fit.sample_times = std::move(times);
  return fit;
}

BasisTable::BasisTable(const RbfNetwork& net, const DesiredTrajectory& traj,
                       double step, std::size_t steps)
    : half_step_(0.5 * step) {
  rows_.reserve(2 * steps + 1);
  for (std::size_t j = 0; j <= 2 * steps; ++j) {
    rows_.push_back(
        eval_basis(net, DesiredState{traj.desired_state(static_cast<double>(j) * half_step_)}));
  }
}

const Eigen::VectorXd* BasisTable::lookup(double t) const {
  const double q = t / half_step_;
  const double j = std::round(q);
  if (j < 0.0 || std::abs(q - j) > 1e-9 ||
      j >= static_cast<double>(rows_.size())) {
    return nullptr;
  }
  return &rows_[static_cast<std::size_t>(j)];
}

}  // namespace danc
