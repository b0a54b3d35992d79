#include <doctest.h>

#include <cmath>
#include <vector>

#include "danc/error.hpp"
#include "danc/trajectory.hpp"

using namespace danc;

namespace {

// Independent closed form of the quintic smoothstep, written out longhand.
double quintic_oracle(double t, double delta) {
  if (t >= delta) return 0.0;
  if (t <= 0.0) return 1.0;
  const double u = t / delta;
  return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double max_fd_error(const ErrorTrajectoryPlan& plan, double step) {
  double worst = 0.0;
  for (double t = step; t < 1.5 * plan.delta; t += 0.013) {
    const double fd = (desired_filtered_error(plan, t + step).value -
                       desired_filtered_error(plan, t - step).value) /
                      (2.0 * step);
    worst = std::max(worst, std::abs(fd - desired_filtered_error(plan, t).rate));
  }
  return worst;
}

}  // namespace

TEST_CASE("zeta endpoints and midpoint") {
  CHECK(zeta(0.0, 2.0) == 1.0);
  CHECK(zeta(2.0, 2.0) == 0.0);
  CHECK(zeta(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(zeta(7.5, 2.0) == 0.0);
  CHECK(zeta_rate(0.0, 2.0) == 0.0);
  CHECK(zeta_rate(2.0, 2.0) == 0.0);
}

TEST_CASE("zeta matches the quintic closed form and is non-increasing") {
  const double delta = 1.7;
  double prev = 2.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = 2.0 * delta * k / 400.0;
    const double z = zeta(t, delta);
    CHECK(z == doctest::Approx(quintic_oracle(t, delta)).epsilon(1e-13));
    CHECK(z <= prev);
    CHECK(z >= 0.0);
    prev = z;
  }
}

TEST_CASE("zeta rejects a non-positive blend time") {
  CHECK_THROWS_AS(zeta(0.5, 0.0), InvalidPlanError);
  CHECK_THROWS_AS(zeta(0.5, -1.0), InvalidPlanError);
  CHECK_THROWS_AS(zeta_rate(0.5, 0.0), InvalidPlanError);
}

TEST_CASE("desired filtered error examples") {
  ErrorTrajectoryPlan plan{2.0, 1.0, ZetaKind::kQuintic};
  auto a = desired_filtered_error(plan, 0.0);
  CHECK(a.value == 2.0);
  CHECK(a.rate == 0.0);
  auto b = desired_filtered_error(plan, 5.0);
  CHECK(b.value == 0.0);
  CHECK(b.rate == 0.0);
  plan.e_f0 = 0.0;
  auto c = desired_filtered_error(plan, 0.3);
  CHECK(c.value == 0.0);
  CHECK(c.rate == 0.0);
}

TEST_CASE("e*_f is exactly zero from the blend time on") {
  const ErrorTrajectoryPlan plan{-3.2, 0.8, ZetaKind::kQuintic};
  for (double t = 0.8; t < 10.0; t += 0.01) {
    CHECK(desired_filtered_error(plan, t).value == 0.0);
    CHECK(desired_filtered_error(plan, t).rate == 0.0);
  }
}

TEST_CASE("rate agrees with central differences at second order") {
  const ErrorTrajectoryPlan plan{1.3, 1.0, ZetaKind::kQuintic};
  const double coarse = max_fd_error(plan, 1e-2);
  const double fine = max_fd_error(plan, 5e-3);
  // Central-difference truncation is at most step^2 / 6 * max|e*'''|, and
  // the quintic's third derivative peaks at 60 / delta^3 at t = 0.
  CHECK(coarse <= 1e-4 / 6.0 * 1.3 * 60.0 * (1.0 + 1e-6));
  // Halving the step should cut the error by about 4.
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("sinusoid reference derivatives") {
  ReferenceSpec spec;
  spec.family = ReferenceFamily::kSinusoid;
  spec.terms = {{1.0, 2.0, 0.0}};
  const DesiredTrajectory traj = make_reference(spec, 2, 10.0, 1e-3);
  for (double t : {0.0, 0.37, 1.9, 6.4}) {
    CHECK(traj.derivative(0, t) == doctest::Approx(std::sin(2 * t)));
    CHECK(traj.derivative(1, t) == doctest::Approx(2 * std::cos(2 * t)));
    CHECK(traj.derivative(2, t) == doctest::Approx(-4 * std::sin(2 * t)));
  }
  const auto x_d = traj.desired_state(0.37);
  REQUIRE(x_d.size() == 2);
  CHECK(x_d(1) == doctest::Approx(2 * std::cos(0.74)));
  CHECK(traj.top_derivative(0.37) == doctest::Approx(-4 * std::sin(0.74)));
}

TEST_CASE("constant and polynomial references") {
  ReferenceSpec c;
  c.family = ReferenceFamily::kConstant;
  c.value = 3.0;
  const DesiredTrajectory tc = make_reference(c, 2, 5.0, 1e-2);
  CHECK(tc.derivative(0, 1.2) == 3.0);
  CHECK(tc.derivative(1, 1.2) == 0.0);
  CHECK(tc.derivative(2, 1.2) == 0.0);

  ReferenceSpec p;
  p.family = ReferenceFamily::kPolynomial;
  p.coefficients = {0.0, 0.0, 1.0};
  const DesiredTrajectory tp = make_reference(p, 2, 5.0, 1e-2);
  for (double t : {0.0, 0.5, 3.0}) {
    CHECK(tp.derivative(0, t) == doctest::Approx(t * t));
    CHECK(tp.derivative(1, t) == doctest::Approx(2 * t));
    CHECK(tp.derivative(2, t) == doctest::Approx(2.0));
  }
}

TEST_CASE("omega_d box brackets every sampled derivative") {
  ReferenceSpec spec;
  spec.terms = {{1.0, 0.5, 0.0}, {0.2, 3.0, 0.4}};
  const DesiredTrajectory traj = make_reference(spec, 2, 10.0, 1e-3);
  const auto& box = traj.omega_d_box();
  REQUIRE(box.lo.size() == 3);
  for (int i = 0; i <= 2; ++i) {
    for (double t = 0.0; t <= 10.0; t += 0.0371) {
      CHECK(traj.derivative(i, t) >= box.lo[i] - 1e-6);
      CHECK(traj.derivative(i, t) <= box.hi[i] + 1e-6);
    }
  }
}

TEST_CASE("reference family names") {
  CHECK(reference_family_from_string("sinusoid") == ReferenceFamily::kSinusoid);
  CHECK(to_string(ReferenceFamily::kPolynomial) == "polynomial");
  CHECK_THROWS_AS(reference_family_from_string("chirp"), ConfigError);
}
