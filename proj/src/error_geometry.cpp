#include "danc/error_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "danc/error.hpp"

namespace danc {

namespace {

// Companion matrix of s^m + l_m s^{m-1} + ... + l_1 in controllable form, so
// that z = (e_1, e_1', ..., e_1^{(m-1)}) obeys z' = A z under zero input.
Eigen::MatrixXd companion(const std::vector<double>& lambda) {
  const auto m = static_cast<Eigen::Index>(lambda.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i + 1 < m; ++i) a(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    a(m - 1, j) = -lambda[static_cast<std::size_t>(j)];
  }
  return a;
}

}  // namespace

std::string describe_filter_polynomial(const std::vector<double>& lambda) {
  auto power = [](std::size_t j) -> std::string {
    if (j == 0) return "";
    if (j == 1) return " s";
    return " s^" + std::to_string(j);
  };
  std::ostringstream s;
  const auto m = lambda.size();
  s << (m == 0 ? "1" : m == 1 ? "s" : "s^" + std::to_string(m));
  for (std::size_t j = m; j-- > 0;) {
    if (lambda[j] == 0.0) continue;
    s << (lambda[j] < 0.0 ? " - " : " + ") << std::abs(lambda[j]) << power(j);
  }
  return s.str();
}

namespace {

double gain_sq(const std::vector<double>& lambda, double omega) {
  // p(j w) by Horner, highest power first.
  const std::complex<double> s(0.0, omega);
  std::complex<double> p(1.0, 0.0);
  for (std::size_t j = lambda.size(); j-- > 0;) p = p * s + lambda[j];
  return 1.0 / std::norm(p);
}

}  // namespace

Eigen::VectorXcd filter_polynomial_roots(const std::vector<double>& lambda) {
  if (lambda.empty()) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion(lambda), false);
  return solver.eigenvalues();
}

bool check_hurwitz(const std::vector<double>& lambda) {
  if (lambda.empty()) return true;
  for (double l : lambda) {
    if (!std::isfinite(l)) return false;
  }
  const Eigen::VectorXcd roots = filter_polynomial_roots(lambda);
  return (roots.real().array() < -kHurwitzMargin).all();
}

double filtered_error(const Eigen::VectorXd& e, const std::vector<double>& lambda) {
  require_same_size(static_cast<std::size_t>(e.size()), lambda.size() + 1,
                    "filtered error");
  double ef = e[e.size() - 1];
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    ef += lambda[i] * e[static_cast<Eigen::Index>(i)];
  }
  return ef;
}

double aux_nu(const Eigen::VectorXd& e, const std::vector<double>& lambda,
              double ydn, double de_star) {
  require_same_size(static_cast<std::size_t>(e.size()), lambda.size() + 1,
                    "auxiliary signal");
  double nu = -ydn - de_star;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    nu += lambda[i] * e[static_cast<Eigen::Index>(i + 1)];
  }
  return nu;
}

double filter_peak_gain_squared(const std::vector<double>& lambda) {
  if (lambda.empty()) return 1.0;
  constexpr int kPoints = 4001;
  constexpr double kLogLo = -4.0, kLogHi = 4.0;
  double best = gain_sq(lambda, 0.0);
  int best_k = -1;
  for (int k = 0; k < kPoints; ++k) {
    const double w = std::pow(10.0, kLogLo + (kLogHi - kLogLo) * k / (kPoints - 1));
    const double v = gain_sq(lambda, w);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  if (best_k < 0) return best;
  // Golden-section refinement in log-frequency around the grid peak.
  const double step = (kLogHi - kLogLo) / (kPoints - 1);
  double a = kLogLo + (best_k - 1) * step, b = kLogLo + (best_k + 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto value = [&](double lw) { return gain_sq(lambda, std::pow(10.0, lw)); };
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = value(c), fd = value(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = value(d);
    }
  }
  return std::max({best, fc, fd});
}

double filter_transient_energy(const std::vector<double>& lambda, double horizon) {
  if (lambda.empty()) return 0.0;
  const Eigen::MatrixXd a = companion(lambda);
  const Eigen::VectorXcd roots = filter_polynomial_roots(lambda);
  const double slowest = (-roots.real().array()).minCoeff();
  const double fastest = roots.cwiseAbs().maxCoeff();
  const double t_end = std::max(horizon, 40.0 / slowest);
  double dt = 0.005 / std::max(1.0, fastest);
  auto steps = static_cast<long>(std::ceil(t_end / dt));
  steps = std::min(steps, 2'000'000L);
  dt = t_end / static_cast<double>(steps);

  const auto m = a.rows();
  // Columns are the free responses from each unit initial state; the output
  // is e_1, the first state component.
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  auto accumulate = [&](double weight) {
    const Eigen::RowVectorXd y = z.row(0);
    gram.noalias() += weight * (y.transpose() * y);
  };
  accumulate(0.5 * dt);
  for (long k = 0; k < steps; ++k) {
    const Eigen::MatrixXd k1 = a * z;
    const Eigen::MatrixXd k2 = a * (z + 0.5 * dt * k1);
    const Eigen::MatrixXd k3 = a * (z + 0.5 * dt * k2);
    const Eigen::MatrixXd k4 = a * (z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    accumulate(k + 1 == steps ? 0.5 * dt : dt);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  return eig.eigenvalues().maxCoeff();
}

FilterConstants estimate_c1_c2(const std::vector<double>& lambda, double horizon) {
  if (!check_hurwitz(lambda)) {
    throw InvalidFilterError("filter polynomial " + describe_filter_polynomial(lambda) +
                             " is not Hurwitz");
  }
  FilterConstants out;
  if (lambda.empty()) return out;  // H = 1
  out.peak_gain_sq = filter_peak_gain_squared(lambda);
  out.transient_energy = filter_transient_energy(lambda, horizon);
  out.c1 = 1.5 * out.peak_gain_sq;
  out.c2_per_unit = 3.0 * out.transient_energy;
  return out;
}

}  // namespace danc
