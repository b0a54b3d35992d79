#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace danc {

/// Closed-form reference families. Every family has analytic derivatives of
/// any order, so y_d^(n) fed to the auxiliary signal is exact.
enum class ReferenceFamily { kSinusoid, kPolynomial, kConstant };

std::string to_string(ReferenceFamily family);
ReferenceFamily reference_family_from_string(const std::string& name);

struct SinusoidTerm {
  double amplitude = 1.0;
  double omega = 1.0;  // rad/s
  double phase = 0.0;  // rad

  bool operator==(const SinusoidTerm&) const = default;
};

struct ReferenceSpec {
  ReferenceFamily family = ReferenceFamily::kSinusoid;
  std::vector<SinusoidTerm> terms;    // kSinusoid
  double offset = 0.0;                // kSinusoid
  std::vector<double> coefficients;   // kPolynomial, ascending powers of t
  double value = 0.0;                 // kConstant

  bool operator==(const ReferenceSpec&) const = default;
};

/// Per-derivative min/max of the reference over the horizon (the set Omega_d).
struct DerivativeBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// The reference bundle [y_d, y_d', ..., y_d^(n)] as functions of time.
class DesiredTrajectory {
 public:
  DesiredTrajectory(ReferenceSpec spec, int order, double horizon,
                    double sample_step);

  int order() const { return order_; }
  double horizon() const { return horizon_; }
  const ReferenceSpec& spec() const { return spec_; }

  /// i-th time derivative of y_d, 0 <= i <= order.
  double derivative(int i, double t) const;

  /// Desired state x_d = [y_d, ..., y_d^(n-1)].
  Eigen::VectorXd desired_state(double t) const;

  /// y_d^(n).
  double top_derivative(double t) const { return derivative(order_, t); }

  /// Bounds for derivatives 0..order, from dense sampling of [0, horizon].
  const DerivativeBox& omega_d_box() const { return box_; }

 private:
  ReferenceSpec spec_;
  int order_;
  double horizon_;
  DerivativeBox box_;
};

/// Builds the bundle; the box is sampled at step h/10 over [0, horizon].
DesiredTrajectory make_reference(const ReferenceSpec& spec, int order,
                                 double horizon, double h);

enum class ZetaKind { kQuintic };

struct ErrorTrajectoryPlan {
  double e_f0 = 0.0;
  double delta = 1.0;
  ZetaKind zeta_kind = ZetaKind::kQuintic;
};

/// Quintic smoothstep blend from 1 at t = 0 to 0 at t = delta, zero after.
/// Throws InvalidPlanError for delta <= 0.
double zeta(double t, double delta);
double zeta_rate(double t, double delta);

struct FilteredErrorTarget {
  double value = 0.0;
  double rate = 0.0;
};

/// e*_f(t) = e_f(0) * zeta(t) and its time derivative.
FilteredErrorTarget desired_filtered_error(const ErrorTrajectoryPlan& plan,
                                           double t);

}  // namespace danc
