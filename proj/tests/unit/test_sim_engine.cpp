#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "danc/error.hpp"
#include "danc/plant.hpp"
#include "danc/sim_engine.hpp"

using namespace danc;

namespace {

Eigen::VectorXd decay(double, const Eigen::VectorXd& x) { return -x; }

double rk4_decay_error(double h, double t_end) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
  const int steps = static_cast<int>(std::lround(t_end / h));
  for (int k = 0; k < steps; ++k) x = rk4_step(decay, x, k * h, h, k);
  return std::abs(x[0] - std::exp(-t_end));
}

Scenario short_scenario(Scheme scheme, double horizon = 2.0) {
  Scenario s;
  s.scheme = scheme;
  s.horizon = horizon;
  s.delta = std::min(1.0, horizon / 2.0);
  return s;
}

// Final plant state of a run, compared across step sizes.
Eigen::Vector2d final_state(Scenario s, double h) {
  s.h = h;
  s.tau = 10 * h;
  const SimResult r = run_closed_loop(s);
  REQUIRE(r.completed());
  return {r.trace.column("x1").back(), r.trace.column("x2").back()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("rk4 on exponential decay") {
  CHECK(rk4_decay_error(0.01, 1.0) < 1e-8);
  CHECK(std::abs(rk4_decay_error(0.01, 1.0)) >= 0.0);
}

TEST_CASE("rk4 error ratio under step halving is near 16") {
  for (double h : {0.1, 0.05, 0.025}) {
    const double ratio = rk4_decay_error(h, 1.0) / rk4_decay_error(h / 2, 1.0);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("rk4 trivial derivatives") {
  const Eigen::Vector3d x(1.0, -2.0, 0.25);
  auto zero = [](double, const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()); };
  CHECK(rk4_step(zero, x, 0.0, 0.3) == Eigen::VectorXd(x));
  auto unit = [](double, const Eigen::VectorXd& v) { return Eigen::VectorXd::Ones(v.size()); };
  const Eigen::VectorXd y = rk4_step(unit, x, 0.0, 0.5);
  CHECK(y[0] == 1.5);
  CHECK(y[1] == -1.5);
  CHECK(y[2] == 0.75);
}

TEST_CASE("rk4 reports the step of a non-finite derivative") {
  auto bad = [](double, const Eigen::VectorXd& v) {
    return Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
  };
  try {
    rk4_step(bad, Eigen::VectorXd::Ones(1), 0.0, 0.1, 17);
    FAIL("expected a blowup");
  } catch (const NumericBlowupError& e) {
    CHECK(e.step() == 17);
  }
  CHECK_THROWS_AS(rk4_step(decay, Eigen::VectorXd::Ones(1), 0.0, 0.0), PreconditionError);
}

TEST_CASE("rk4 on the P1 plant under a smooth input is fourth order") {
  const PlantModel p1 = builtin_plant("P1");
  auto rhs = [&](double t, const Eigen::VectorXd& x) {
    return plant_derivative(p1, x, std::sin(2.0 * t) - 0.5 * x[0]);
  };
  auto run = [&](double h) {
    Eigen::VectorXd x = Eigen::Vector2d(0.8, -0.3);
    const int steps = static_cast<int>(std::lround(4.0 / h));
    for (int k = 0; k < steps; ++k) x = rk4_step(rhs, x, k * h, h, k);
    return x;
  };
  const Eigen::VectorXd ref = run(1e-4);
  for (double h : {0.1, 0.05}) {
    const double ratio = (run(h) - ref).norm() / (run(h / 2) - ref).norm();
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

// The closed loop is only piecewise smooth (|.| terms in the robust gain, and
// e_tilde keeps crossing zero), so only plain convergence is asserted here.
TEST_CASE("closed-loop scheme A converges under step halving") {
  const Scenario s = short_scenario(Scheme::kA, 2.0);
  const Eigen::Vector2d ref = final_state(s, 1.25e-4);
  const double e1 = (final_state(s, 4e-3) - ref).norm();
  const double e2 = (final_state(s, 2e-3) - ref).norm();
  MESSAGE("h-halving ratio " << e1 / e2);
  CHECK(e2 < e1);
  CHECK(e1 < 1e-4);
}

TEST_CASE("trace has horizon/h + 1 rows on an exact time grid") {
  for (Scheme scheme : {Scheme::kA, Scheme::kB, Scheme::kC}) {
    const SimResult r = run_closed_loop(short_scenario(scheme, 1.0));
    REQUIRE(r.completed());
    CHECK(r.trace.rows() == 1001);
    const auto& t = r.trace.column("t");
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t[k] == static_cast<double>(k) * 1e-3);
  }
}

TEST_CASE("initial offset of the filtered error is zero") {
  for (Scheme scheme : {Scheme::kA, Scheme::kB, Scheme::kC}) {
    Scenario s = short_scenario(scheme, 1.0);
    s.x0 = {1.7, -0.4};
    const SimResult r = run_closed_loop(s);
    REQUIRE(r.completed());
    CHECK(std::abs(r.trace.column("et").front()) <= 4 * std::numeric_limits<double>::epsilon() * 2.0);
    CHECK(r.trace.column("ef").front() == r.trace.column("ef_star").front());
  }
}

TEST_CASE("identical scenarios give bit-identical traces") {
  for (Scheme scheme : {Scheme::kA, Scheme::kC}) {
    const Scenario s = short_scenario(scheme, 1.0);
    CHECK(trace_csv(run_closed_loop(s).trace, true) == trace_csv(run_closed_loop(s).trace, true));
  }
}

TEST_CASE("precomputed basis gives the same trace as per-step evaluation") {
  Scenario s = short_scenario(Scheme::kA, 1.0);
  const std::string direct = trace_csv(run_closed_loop(s).trace, true);
  s.precompute_basis = true;
  const SimResult r = run_closed_loop(s);
  CHECK(trace_csv(r.trace, true) == direct);
  CHECK(r.max_basis_audit_error == 0.0);
}

TEST_CASE("zero reference from rest stays at the equilibrium") {
  for (Scheme scheme : {Scheme::kA, Scheme::kB, Scheme::kC}) {
    Scenario s = short_scenario(scheme, 2.0);
    s.reference = {ReferenceFamily::kConstant, {}, 0.0, {}, 0.0};
    s.x0 = {0.0, 0.0};
    const SimResult r = run_closed_loop(s);
    REQUIRE(r.completed());
    for (double v : r.trace.column("ef")) CHECK(v == 0.0);
    for (double v : r.trace.column("u")) CHECK(v == 0.0);
  }
}

TEST_CASE("incremental runs keep the update residual tiny and the basis on x_d") {
  for (Scheme scheme : {Scheme::kB, Scheme::kC}) {
    const SimResult r = run_closed_loop(short_scenario(scheme, 2.0));
    REQUIRE(r.completed());
    CHECK(r.max_incremental_residual <= 1e-12);
    CHECK(r.max_basis_audit_error == 0.0);
  }
}

TEST_CASE("a destabilizing step size aborts with a partial trace") {
  Scenario s = short_scenario(Scheme::kB, 2.0);
  s.kappa = 1e4;
  s.h = 0.01;
  s.tau = 0.01;
  const SimResult r = run_closed_loop(s);
  CHECK(r.status == RunStatus::kNumericBlowup);
  CHECK(r.trace.rows() > 0);
  CHECK(r.trace.rows() < 201);
  CHECK(r.diagnostic.find("step") != std::string::npos);
}

TEST_CASE("a gain crossing zero aborts with the gain-sign status") {
  ClosedLoopSetup setup = build_setup(short_scenario(Scheme::kB, 10.0));
  setup.plant.g = [](const Eigen::VectorXd& x) { return 1.0 - x[0]; };
  const SimResult r = run_closed_loop(setup);
  CHECK(r.status == RunStatus::kGainSign);
  CHECK(r.trace.rows() > 1);
  CHECK(r.trace.rows() < 10001);
  CHECK(r.diagnostic.find("gain-sign") != std::string::npos);
}

TEST_CASE("trace csv round trip") {
  const SimResult r = run_closed_loop(short_scenario(Scheme::kC, 0.2));
  const std::string path = temp_path("danc_trace_roundtrip.csv");
  write_trace_csv(r.trace, path, false);
  const SimTrace back = read_trace_csv(path);
  CHECK(back.rows() == r.trace.rows());
  for (const auto& name : back.names()) {
    const auto& a = back.column(name);
    const auto& b = r.trace.column(name);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-11).scale(1e-300));
    }
  }
  CHECK_FALSE(back.has_column("rho"));
  write_trace_csv(r.trace, path, true);
  const SimTrace verbose = read_trace_csv(path);
  CHECK(verbose.has_column("rho"));
  CHECK(verbose.has_column("wf_1"));
  CHECK(verbose.has_column("wg_49"));
  std::filesystem::remove(path);
}

TEST_CASE("malformed trace files are rejected") {
  const std::string path = temp_path("danc_trace_bad.csv");
  {
    std::ofstream(path) << "t,x1\n0.0,1.0\n0.1\n";
  }
  CHECK_THROWS_AS(read_trace_csv(path), TraceFormatError);
  {
    std::ofstream(path) << "t,x1\n0.0,abc\n";
  }
  CHECK_THROWS_AS(read_trace_csv(path), TraceFormatError);
  {
    std::ofstream(path) << "";
  }
  CHECK_THROWS_AS(read_trace_csv(path), TraceFormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_trace_csv(path), TraceFormatError);

  const SimTrace t({"t", "x1"});
  CHECK_THROWS_AS(t.column("bogus"), TraceFormatError);
}

TEST_CASE("invalid scenarios fail setup") {
  Scenario s;
  s.lambda = {-1.0};
  CHECK_THROWS_AS(build_setup(s), ConfigError);
  s = Scenario{};
  s.tau = 0.0105;
  CHECK_THROWS_AS(build_setup(s), ConfigError);
  s = Scenario{};
  s.gamma_f = {1.0, 2.0};
  CHECK_THROWS_AS(build_setup(s), ConfigError);
}
