#include <doctest.h>

#include <cmath>
#include <vector>

#include "danc/error.hpp"
#include "danc/plant.hpp"
#include "danc/rbf_net.hpp"
#include "danc/trajectory.hpp"

using namespace danc;

namespace {

DesiredTrajectory nominal_reference(double horizon = 10.0) {
  ReferenceSpec spec;
  spec.terms = {{1.0, 0.5, 0.0}};
  return make_reference(spec, 2, horizon, 1e-3);
}

RbfNetwork grid_network(const DesiredTrajectory& traj, int per_axis) {
  CenterGrid g = place_centers_grid(traj.omega_d_box(), traj.order(), per_axis);
  return RbfNetwork(g.centers, g.widths);
}

// Plain least squares through a QR of the design matrix, sharing nothing
// with the library's normal-equation path.
Eigen::VectorXd qr_oracle(const TargetFunction& target, const DesiredTrajectory& traj,
                          const RbfNetwork& net, double step) {
  const int samples = static_cast<int>(std::floor(traj.horizon() / step + 1e-9)) + 1;
  Eigen::MatrixXd phi(samples, net.size());
  Eigen::VectorXd y(samples);
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXd z = traj.desired_state(k * step);
    for (Eigen::Index i = 0; i < net.size(); ++i) {
      const double d2 = (net.centers().row(i).transpose() - z).squaredNorm();
      phi(k, i) = std::exp(-d2 / (net.widths()[i] * net.widths()[i]));
    }
    y[k] = target(z);
  }
  return phi.colPivHouseholderQr().solve(y);
}

}  // namespace

TEST_CASE("basis value at a center and one width away") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 0.0, 3.0, -1.0;
  const RbfNetwork net(c, Eigen::Vector2d(0.5, 2.0));
  Eigen::VectorXd s = eval_basis(net, {Eigen::Vector2d(0.0, 0.0)});
  CHECK(s[0] == 1.0);
  s = eval_basis(net, {Eigen::Vector2d(3.0, 1.0)});
  CHECK(s[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("basis decays far from every center") {
  Eigen::MatrixXd c(2, 1);
  c << 0.0, 1.0;
  const RbfNetwork net(c, Eigen::Vector2d(0.3, 0.3));
  const Eigen::VectorXd s = eval_basis(net, {Eigen::VectorXd::Constant(1, 1.0 + 10 * 0.3)});
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(s[i] <= std::exp(-100.0));
}

TEST_CASE("basis rejects a wrong input dimension") {
  const RbfNetwork net(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(3));
  CHECK_THROWS_AS(eval_basis(net, {Eigen::VectorXd::Zero(3)}), ShapeError);
  CHECK_THROWS_AS(RbfNetwork(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(2)),
                  ShapeError);
  CHECK_THROWS_AS(RbfNetwork(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1)),
                  ConfigError);
}

TEST_CASE("network output examples") {
  CHECK(network_output(Eigen::VectorXd::Zero(3), Eigen::Vector3d(0.1, 2.0, -4.0)) == 0.0);
  CHECK(network_output(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.5, 0.9)) == 0.5);
  CHECK(network_output(Eigen::Vector2d(2.0, 3.0), Eigen::Vector2d(1.0, 1.0)) == 5.0);
  CHECK_THROWS_AS(network_output(Eigen::Vector2d(1, 1), Eigen::Vector3d(1, 1, 1)), ShapeError);

  RbfNetwork net(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Ones(2));
  net.set_weights(Eigen::Vector2d(2.0, 3.0));
  CHECK(network_output(net, Eigen::Vector2d(1.0, 1.0)) == 5.0);
  CHECK_THROWS_AS(net.set_weights(Eigen::VectorXd::Zero(5)), ShapeError);
}

TEST_CASE("grid on the unit square with two per axis sits on the inflated corners") {
  const CenterGrid g = place_centers_grid({0.0, 0.0}, {1.0, 1.0}, 2);
  REQUIRE(g.centers.rows() == 4);
  std::vector<std::pair<double, double>> seen;
  for (int i = 0; i < 4; ++i) seen.emplace_back(g.centers(i, 0), g.centers(i, 1));
  for (double a : {-0.05, 1.05}) {
    for (double b : {-0.05, 1.05}) {
      bool found = false;
      for (auto [x, y] : seen) found = found || (std::abs(x - a) < 1e-15 && std::abs(y - b) < 1e-15);
      CHECK(found);
    }
  }
}

TEST_CASE("three per axis on [0, 1] gives spacing 0.55") {
  const CenterGrid g = place_centers_grid({0.0}, {1.0}, 3);
  REQUIRE(g.centers.rows() == 3);
  CHECK(g.centers(1, 0) - g.centers(0, 0) == doctest::Approx(0.55).epsilon(1e-14));
  CHECK(g.centers(2, 0) - g.centers(1, 0) == doctest::Approx(0.55).epsilon(1e-14));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(g.widths[i] == doctest::Approx(0.55));
}

TEST_CASE("a degenerate axis collapses and the width floor applies") {
  const CenterGrid g = place_centers_grid({0.0, 2.0}, {1.0, 2.0}, 4);
  CHECK(g.centers.rows() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(g.centers(i, 1) == 2.0);

  const CenterGrid point = place_centers_grid({1.0, 2.0}, {1.0, 2.0}, 5);
  CHECK(point.centers.rows() == 1);
  CHECK(point.widths[0] == kWidthFloor);
}

TEST_CASE("anisotropic box takes the coarsest axis spacing as width") {
  const CenterGrid g = place_centers_grid({0.0, 0.0}, {1.0, 4.0}, 3);
  CHECK(g.centers.rows() == 9);
  CHECK(g.widths[0] == doctest::Approx(1.1 * 4.0 / 2.0));
}

TEST_CASE("grid input errors") {
  CHECK_THROWS_AS(place_centers_grid({0.0}, {1.0}, 1), ConfigError);
  CHECK_THROWS_AS(place_centers_grid({1.0}, {0.0}, 3), ConfigError);
  CHECK_THROWS_AS(place_centers_grid({0.0, 0.0}, {1.0}, 3), ShapeError);
}

TEST_CASE("zero target fits to zero") {
  const DesiredTrajectory traj = nominal_reference();
  const RbfNetwork net = grid_network(traj, 7);
  const IdealFit fit = fit_ideal_weights([](const Eigen::VectorXd&) { return 0.0; }, traj, net, 0.01);
  CHECK(fit.w_star.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.eps_bar == 0.0);
}

TEST_CASE("first basis function is represented exactly") {
  const DesiredTrajectory traj = nominal_reference();
  const RbfNetwork net = grid_network(traj, 3);
  const TargetFunction s1 = [&](const Eigen::VectorXd& z) { return net.basis_at(z)[0]; };
  const IdealFit fit = fit_ideal_weights(s1, traj, net, 0.01, 0.0);
  CHECK(fit.eps_bar < 1e-8);
  const Eigen::VectorXd oracle = qr_oracle(s1, traj, net, 0.01);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(net.size());
  e1[0] = 1.0;
  CHECK((oracle - e1).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((fit.w_star - e1).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("eps_bar is the largest residual over the fit samples") {
  const DesiredTrajectory traj = nominal_reference();
  const RbfNetwork net = grid_network(traj, 5);
  const PlantModel p1 = builtin_plant("P1");
  const IdealFit fit = fit_ideal_weights(p1.g, traj, net, 0.01);
  double worst = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const Eigen::VectorXd z = traj.desired_state(k * 0.01);
    const double r = p1.g(z) - fit.w_star.dot(net.basis_at(z));
    CHECK(std::abs(r) <= fit.eps_bar + 1e-15);
    worst = std::max(worst, std::abs(r));
  }
  CHECK(worst == doctest::Approx(fit.eps_bar).epsilon(1e-9));
}

TEST_CASE("P1 drift fits below 1e-2 with 49 grid centers") {
  const DesiredTrajectory traj = nominal_reference();
  const RbfNetwork net = grid_network(traj, 7);
  REQUIRE(net.size() == 49);
  const PlantModel p1 = builtin_plant("P1");
  const IdealFit fit = fit_ideal_weights(p1.f, traj, net, 0.01);
  CHECK(fit.eps_bar < 1e-2);
  // Recorded from the first verified run: about 5e-5.
  CHECK(fit.eps_bar < 1e-4);
  // The library fit and the QR oracle describe the same function on the samples.
  const Eigen::VectorXd w = qr_oracle(p1.f, traj, net, 0.01);
  double gap = 0.0;
  for (int k = 0; k <= 1000; k += 7) {
    const Eigen::VectorXd s = net.basis_at(traj.desired_state(k * 0.01));
    gap = std::max(gap, std::abs(w.dot(s) - fit.w_star.dot(s)));
  }
  CHECK(gap < 1e-3);
}

// 25 -> 49 -> 100 -> 196 nodes. The default ridge leaves a floor under every
// fit: against the unregularized optimum w0 the ridge fit loses at most
// sqrt(ridge) * |w0| in rms, so changes of a small multiple of that are noise.
TEST_CASE("roughly doubling the node count never worsens the fit beyond the ridge floor") {
  const DesiredTrajectory traj = nominal_reference();
  const PlantModel p1 = builtin_plant("P1");
  for (const auto& target : {p1.f, p1.g}) {
    IdealFit prev;
    bool first = true;
    for (int per_axis : {5, 7, 10, 14}) {
      const IdealFit fit = fit_ideal_weights(target, traj, grid_network(traj, per_axis), 0.01);
      if (!first) {
        const double noise =
            10.0 * std::sqrt(kDefaultRidge) * std::max(prev.w_star.norm(), fit.w_star.norm());
        CHECK_MESSAGE(fit.eps_bar <= prev.eps_bar + noise, "per_axis " << per_axis);
      }
      prev = fit;
      first = false;
    }
  }
}

TEST_CASE("too few samples is a fit error") {
  const DesiredTrajectory traj = nominal_reference(0.1);
  const RbfNetwork net = grid_network(traj, 7);
  CHECK_THROWS_AS(fit_ideal_weights([](const Eigen::VectorXd&) { return 1.0; }, traj, net, 0.01),
                  FitError);
  CHECK_THROWS_AS(fit_ideal_weights([](const Eigen::VectorXd&) { return 1.0; }, traj, net, 0.0),
                  ConfigError);
}

TEST_CASE("basis table returns the direct evaluation on the half-step grid") {
  const DesiredTrajectory traj = nominal_reference(1.0);
  const RbfNetwork net = grid_network(traj, 5);
  const BasisTable table(net, traj, 1e-2, 100);
  for (int k = 0; k <= 200; ++k) {
    const double t = k * 0.005;
    const Eigen::VectorXd* row = table.lookup(t);
    REQUIRE(row != nullptr);
    CHECK((*row - eval_basis(net, {traj.desired_state(t)})).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(table.lookup(0.0031) == nullptr);
}
