#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace danc {

/// Filter coefficients Lambda = [l_1 ... l_{n-1}] of
/// s^{n-1} + l_{n-1} s^{n-2} + ... + l_1, plus the constants c1, c2 with
/// int e_1^2 <= c1 int e_f^2 + c2.
struct FilterSpec {
  std::vector<double> lambda;
  double c1 = 1.0;
  double c2 = 0.0;
};

/// Human-readable form, e.g. "s^2 + 3 s + 2".
std::string describe_filter_polynomial(const std::vector<double>& lambda);

/// Strict real-part margin used by check_hurwitz.
inline constexpr double kHurwitzMargin = 1e-9;

/// Roots of s^{m} + l_m s^{m-1} + ... + l_1 (companion-matrix eigenvalues).
Eigen::VectorXcd filter_polynomial_roots(const std::vector<double>& lambda);

/// True iff every root has real part < -kHurwitzMargin. Empty lambda (n = 1)
/// is vacuously Hurwitz.
bool check_hurwitz(const std::vector<double>& lambda);

/// e_f = sum_i l_i e_i + e_n.
double filtered_error(const Eigen::VectorXd& e, const std::vector<double>& lambda);

/// nu = sum_i l_i e_{i+1} - y_d^(n) - de*_f.
double aux_nu(const Eigen::VectorXd& e, const std::vector<double>& lambda,
              double ydn, double de_star);

/// Squared peak gain of H(s) = 1 / (s^{n-1} + ... + l_1) from a log-spaced
/// frequency sweep refined around the peak.
double filter_peak_gain_squared(const std::vector<double>& lambda);

/// Worst-case zero-input energy int_0^inf e_1^2 over unit initial filter
/// states (largest eigenvalue of the simulated observability Gramian).
double filter_transient_energy(const std::vector<double>& lambda, double horizon);

struct FilterConstants {
  double c1 = 1.0;
  double c2_per_unit = 0.0;  // multiply by |e(0)|^2
  double peak_gain_sq = 1.0;
  double transient_energy = 0.0;

  double c2(double e0_norm_sq) const { return c2_per_unit * e0_norm_sq; }
};

/// Splitting e_1 into forced and free response with
/// (a + b)^2 <= 1.5 a^2 + 3 b^2 gives c1 = 1.5 |H|_inf^2 and
/// c2 = 3 E_free |e(0)|^2. For n = 1, H = 1: c1 = 1, c2 = 0.
/// Throws InvalidFilterError for a non-Hurwitz lambda.
FilterConstants estimate_c1_c2(const std::vector<double>& lambda, double horizon);

}  // namespace danc
