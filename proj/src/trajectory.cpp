#include "danc/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "danc/error.hpp"

namespace danc {

std::string to_string(ReferenceFamily family) {
  switch (family) {
    case ReferenceFamily::kSinusoid:
      return "sinusoid";
    case ReferenceFamily::kPolynomial:
      return "polynomial";
    case ReferenceFamily::kConstant:
      return "constant";
  }
  return "unknown";
}

ReferenceFamily reference_family_from_string(const std::string& name) {
  if (name == "sinusoid") return ReferenceFamily::kSinusoid;
  if (name == "polynomial") return ReferenceFamily::kPolynomial;
  if (name == "constant") return ReferenceFamily::kConstant;
  throw ConfigError("unsupported reference family '" + name +
                    "' (expected sinusoid, polynomial or constant)");
}

namespace {

// k-th derivative of a*sin(w t + p); the quarter-turn cycle avoids adding
// k*pi/2 to the phase.
double sinusoid_derivative(const SinusoidTerm& term, int k, double t) {
  const double arg = term.omega * t + term.phase;
  const double scale = term.amplitude * std::pow(term.omega, k);
  switch (k % 4) {
    case 0:
      return scale * std::sin(arg);
    case 1:
      return scale * std::cos(arg);
    case 2:
      return -scale * std::sin(arg);
    default:
      return -scale * std::cos(arg);
  }
}

double polynomial_derivative(const std::vector<double>& c, int k, double t) {
  // Horner on the k-times differentiated coefficients.
  double acc = 0.0;
  for (int p = static_cast<int>(c.size()) - 1; p >= k; --p) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= static_cast<double>(p - j);
    acc = acc * t + c[static_cast<std::size_t>(p)] * falling;
  }
  return acc;
}

}  // namespace

DesiredTrajectory::DesiredTrajectory(ReferenceSpec spec, int order,
                                     double horizon, double sample_step)
    : spec_(std::move(spec)), order_(order), horizon_(horizon) {
  if (order_ < 1) throw ConfigError("reference order must be >= 1");
  if (!(horizon_ > 0.0)) throw ConfigError("reference horizon must be > 0");
  if (!(sample_step > 0.0)) throw ConfigError("box sample step must be > 0");
  if (spec_.family == ReferenceFamily::kSinusoid && spec_.terms.empty()) {
    throw ConfigError("sinusoid reference needs at least one term");
  }
  if (spec_.family == ReferenceFamily::kPolynomial &&
      spec_.coefficients.empty()) {
    throw ConfigError("polynomial reference needs coefficients");
  }

  const auto slots = static_cast<std::size_t>(order_ + 1);
  box_.lo.assign(slots, std::numeric_limits<double>::infinity());
  box_.hi.assign(slots, -std::numeric_limits<double>::infinity());
  const auto samples =
      static_cast<std::size_t>(std::ceil(horizon_ / sample_step));
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = std::min(static_cast<double>(k) * sample_step, horizon_);
    for (int i = 0; i <= order_; ++i) {
      const double v = derivative(i, t);
      const auto s = static_cast<std::size_t>(i);
      box_.lo[s] = std::min(box_.lo[s], v);
      box_.hi[s] = std::max(box_.hi[s], v);
    }
  }
}

double DesiredTrajectory::derivative(int i, double t) const {
  switch (spec_.family) {
    case ReferenceFamily::kSinusoid: {
      double v = (i == 0) ? spec_.offset : 0.0;
      for (const auto& term : spec_.terms) v += sinusoid_derivative(term, i, t);
      return v;
    }
    case ReferenceFamily::kPolynomial:
      return polynomial_derivative(spec_.coefficients, i, t);
    case ReferenceFamily::kConstant:
      return i == 0 ? spec_.value : 0.0;
  }
  return 0.0;
}

Eigen::VectorXd DesiredTrajectory::desired_state(double t) const {
  Eigen::VectorXd xd(order_);
  for (int i = 0; i < order_; ++i) xd[i] = derivative(i, t);
  return xd;
}

DesiredTrajectory make_reference(const ReferenceSpec& spec, int order,
                                 double horizon, double h) {
  return DesiredTrajectory(spec, order, horizon, h / 10.0);
}

double zeta(double t, double delta) {
  if (!(delta > 0.0)) throw InvalidPlanError("settling moment delta must be > 0");
  if (t >= delta) return 0.0;
  if (t <= 0.0) return 1.0;
  const double u = t / delta;
  const double u3 = u * u * u;
  return 1.0 - u3 * (10.0 - 15.0 * u + 6.0 * u * u);
}

double zeta_rate(double t, double delta) {
  if (!(delta > 0.0)) throw InvalidPlanError("settling moment delta must be > 0");
  if (t >= delta || t <= 0.0) return 0.0;
  const double u = t / delta;
  const double u2 = u * u;
  return -30.0 * u2 * (1.0 - u) * (1.0 - u) / delta;
}

FilteredErrorTarget desired_filtered_error(const ErrorTrajectoryPlan& plan,
                                           double t) {
  if (!(plan.delta > 0.0)) {
    throw InvalidPlanError("settling moment delta must be > 0");
  }
  if (t >= plan.delta) return {0.0, 0.0};
  return {plan.e_f0 * zeta(t, plan.delta), plan.e_f0 * zeta_rate(t, plan.delta)};
}

}  // namespace danc
