// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "danc/analysis.hpp"
#include "danc/error_geometry.hpp"
#include "danc/pipeline.hpp"
#include "danc/scenario.hpp"
#include "danc/sim_engine.hpp"

using namespace danc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str());
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// One nominal verification per scheme, timed.
struct SchemeRun {
  Scheme scheme;
  Verification v;
  double seconds = 0.0;
};

Scenario nominal(Scheme scheme) {
  Scenario s;  // P1, sin(0.5 t), kappa 4, eps 0.01, eta 0.5, Gamma 5I, sigma 0.01, N 49
  s.scheme = scheme;
  return s;
}

SchemeRun run_nominal(Scheme scheme) {
  SchemeRun r{scheme, {}, 0.0};
  const auto start = Clock::now();
  r.v = run_verification(nominal(scheme), false);
  r.seconds = seconds_since(start);
  return r;
}

const CheckSummary* check(const SchemeRun& r, const std::string& name) {
  return r.v.report ? r.v.report->find(name) : nullptr;
}

bool clean(const CheckSummary* c) { return c && c->evaluated > 0 && c->violations == 0; }

std::string describe(const SchemeRun& r, const std::string& name) {
  const CheckSummary* c = check(r, name);
  std::ostringstream out;
  out << to_string(r.scheme) << " " << name << ": ";
  if (!c) return out.str() + "missing";
  out << c->evaluated << " pts, " << c->violations << " viol, margin " << c->min_margin;
  return out.str();
}

// Polynomial roots by Durand-Kerner iteration; no companion matrix involved.
std::vector<std::complex<double>> durand_kerner(const std::vector<double>& lambda) {
  const std::size_t m = lambda.size();
  auto p = [&](std::complex<double> s) {
    std::complex<double> acc = 1.0;
    for (std::size_t i = m; i-- > 0;) acc = acc * s + lambda[i];
    return acc;
  };
  std::vector<std::complex<double>> z(m);
  const std::complex<double> seed(0.4, 0.9);
  double radius = 1.0;
  for (double c : lambda) radius = std::max(radius, 1.0 + std::abs(c));
  for (std::size_t i = 0; i < m; ++i) z[i] = radius * std::pow(seed, static_cast<double>(i));
  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) denom *= z[i] - z[j];
      }
      const std::complex<double> step = p(z[i]) / denom;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return z;
}

int exit_status(const std::string& command) {
  const int raw = std::system(command.c_str());
  if (raw == -1 || !WIFEXITED(raw)) return -1;
  return WEXITSTATUS(raw);
}

}  // namespace

int main() {
  std::printf("running acceptance criteria\n");
  const SchemeRun runs[] = {run_nominal(Scheme::kA), run_nominal(Scheme::kB),
                            run_nominal(Scheme::kC)};
  const SchemeRun& a = runs[0];
  const SchemeRun& b = runs[1];
  const SchemeRun& c = runs[2];

  // 1. Every simulated trace starts with a zero offset e~_f(0).
  {
    std::vector<std::pair<std::string, SimResult>> traces;
    for (const auto& r : runs) traces.emplace_back("nominal " + to_string(r.scheme), r.v.sim);
    for (Scheme scheme : {Scheme::kA, Scheme::kB, Scheme::kC}) {
      Scenario z = nominal(scheme);
      z.reference = {ReferenceFamily::kConstant, {}, 0.0, {}, 0.0};
      z.x0 = {0.0, 0.0};
      z.horizon = 2.0;
      traces.emplace_back("zero reference", run_closed_loop(z));
      Scenario p3 = nominal(scheme);
      p3.plant = "P3";
      p3.x0 = {-1.2, 0.8};
      p3.horizon = 2.0;
      traces.emplace_back("P3", run_closed_loop(p3));
      Scenario p2 = nominal(scheme);
      p2.plant = "P2";
      p2.x0 = {0.7, 0.1, -0.2};
      p2.lambda = {2.0, 3.0};
      p2.per_axis = 4;
      p2.horizon = 2.0;
      traces.emplace_back("P2", run_closed_loop(p2));
    }
    double worst = 0.0;
    bool ok = true;
    for (const auto& [name, sim] : traces) {
      if (sim.trace.rows() == 0) {
        ok = false;
        continue;
      }
      const double ef0 = sim.trace.column("ef").front();
      const double et0 = std::abs(sim.trace.column("et").front());
      worst = std::max(worst, et0);
      ok = ok && et0 <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ef0));
    }
    report(1, "initial filtered-error offset is zero",
           {ok, std::to_string(traces.size()) + " traces, max |e~_f(0)| " + fmt("%.3g", worst)});
  }

  // 2. UUB for scheme A.
  report(2, "UUB bound, scheme A",
         {clean(check(a, "uub")) && a.seconds <= 1.0,
          describe(a, "uub") + ", bound " + fmt("%.4g", a.v.report ? a.v.report->b_ef : NAN) +
              ", " + fmt("%.3f s", a.seconds)});

  // 3. UUB for schemes B and C.
  report(3, "UUB bound, schemes B and C",
         {clean(check(b, "uub")) && clean(check(c, "uub")) && b.seconds <= 1.0 && c.seconds <= 1.0,
          describe(b, "uub") + "; " + describe(c, "uub") + ", " + fmt("%.3f s", b.seconds) +
              " / " + fmt("%.3f s", c.seconds)});

  // 4. Mean-square inequality for every scheme.
  {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
      ok = ok && clean(check(r, "mean_square"));
      detail += (detail.empty() ? "" : "; ") + describe(r, "mean_square");
    }
    report(4, "mean-square output inequality", {ok, detail});
  }

  // 5. Windowed L2 tails.
  {
    bool ok = clean(check(a, "window_ef")) && clean(check(b, "window_ef")) &&
              clean(check(c, "window_ef")) && clean(check(c, "window_lf")) &&
              clean(check(c, "window_lg"));
    std::string detail = describe(a, "window_ef") + "; " + describe(b, "window_ef") + "; " +
                         describe(c, "window_ef") + "; " + describe(c, "window_lf") + "; " +
                         describe(c, "window_lg");
    report(5, "windowed L2 tail bounds", {ok, detail});
  }

  // 6. Smooth robust inequality on random triples.
  {
    const auto start = Clock::now();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> e(-10.0, 10.0), r(0.0, 20.0), le(-8.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 100000; ++k) {
      const double et = e(rng), rho = r(rng), eps = std::pow(10.0, le(rng));
      const double lhs = -et * smooth_robust_term(et, rho, eps) + std::abs(et) * rho;
      worst = std::max(worst, lhs - eps);
    }
    const double secs = seconds_since(start);
    report(6, "smooth robust inequality",
           {worst <= 0.0 && secs < 1.0,
            "1e5 triples, max slack " + fmt("%.3g", worst) + ", " + fmt("%.3f s", secs)});
  }

  // 7. Lemma oracles.
  {
    int l1 = 0, l2 = 0;
    const auto c1 = lemma1_random_suite(2026);
    const auto c2 = lemma2_random_suite(2026);
    for (const auto& x : c1) l1 += x.positive ? 1 : 0;
    for (const auto& x : c2) l2 += x.verdict.pass ? 1 : 0;
    report(7, "lemma oracles",
           {c1.size() == 10 && c2.size() == 100 && l1 == 10 && l2 == 100,
            "lemma 1 " + std::to_string(l1) + "/10, lemma 2 " + std::to_string(l2) + "/100"});
  }

  // 8. Incremental-law residual.
  report(8, "incremental-law residual",
         {b.v.sim.completed() && c.v.sim.completed() &&
              b.v.sim.max_incremental_residual < 1e-12 && c.v.sim.max_incremental_residual < 1e-12,
          "B " + fmt("%.3g", b.v.sim.max_incremental_residual) + ", C " +
              fmt("%.3g", c.v.sim.max_incremental_residual)});

  // 9. Numerical integrity.
  {
    auto rk4_err = [](double h) {
      auto decay = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return -x; };
      Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
      const int steps = static_cast<int>(std::lround(1.0 / h));
      for (int k = 0; k < steps; ++k) x = rk4_step(decay, x, k * h, h, k);
      return std::abs(x[0] - std::exp(-1.0));
    };
    const double rk4_ratio = rk4_err(0.05) / rk4_err(0.025);

    auto trap_err = [](int n) {
      std::vector<double> t, y;
      for (int k = 0; k <= n; ++k) {
        t.push_back(std::numbers::pi * k / n);
        y.push_back(std::sin(t.back()));
      }
      return std::abs(trapezoid(t, y) - 2.0);
    };
    const double trap_ratio = trap_err(100) / trap_err(200);

    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> degree(1, 4);
    std::uniform_real_distribution<double> coeff(-1.0, 6.0);
    int agree = 0;
    for (int k = 0; k < 100; ++k) {
      std::vector<double> lambda(static_cast<std::size_t>(degree(rng)));
      for (double& v : lambda) v = coeff(rng);
      bool stable = true;
      for (const auto& z : durand_kerner(lambda)) stable = stable && z.real() < -kHurwitzMargin;
      agree += stable == check_hurwitz(lambda) ? 1 : 0;
    }
    const bool ok = rk4_ratio >= 12.0 && rk4_ratio <= 20.0 && std::abs(trap_ratio - 4.0) < 0.1 &&
                    agree == 100;
    report(9, "numerical integrity",
           {ok, "RK4 ratio " + fmt("%.3f", rk4_ratio) + ", trapezoid ratio " +
                    fmt("%.3f", trap_ratio) + ", Hurwitz agreement " + std::to_string(agree) + "/100"});
  }

  // 10. Desired versus conventional approximation.
  {
    const ClosedLoopSetup setup = build_setup(nominal(Scheme::kB));
    const std::vector<double> radii = {1.0, 2.0, 3.0, 4.0, 5.0};
    const ApproximationComparison cmp =
        approximation_comparison(setup.plant.f, setup.traj, 7, 0.01, radii);
    bool ok = true;
    std::string conv;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (i > 0) ok = ok && cmp.conventional_residual[i] >= cmp.conventional_residual[i - 1];
      ok = ok && cmp.da_eps_bar[i] == cmp.da_eps_bar[0];
      conv += (conv.empty() ? "" : " ") + fmt("%.3g", cmp.conventional_residual[i]);
    }
    report(10, "desired approximation is independent of the state box",
           {ok, "conventional [" + conv + "], DA " + fmt("%.3g", cmp.da_eps_bar[0]) +
                    " on every box, N = " + std::to_string(cmp.nodes)});
  }

  // 11. Falsification: the verifier must reject a wrong kappa.
  {
    const std::string cmd = std::string("\"") + DANC_CLI_PATH + "\" verify --config \"" +
                            DANC_FIXTURE_DIR + "/falsify_kappa.toml\" --out-dir \"" +
                            DANC_SCRATCH_DIR + "/falsify\" > /dev/null 2>&1";
    const int status = exit_status(cmd);
    report(11, "verifier rejects a corrupted kappa",
           {status != 0 && status != -1, "exit status " + std::to_string(status)});
  }

  // 12. Adjustability trends.
  {
    const std::vector<SweepRow> k_rows = run_sweep(nominal(Scheme::kB), "kappa", {1, 2, 4, 8}, 4);
    const std::vector<SweepRow> e_rows =
        run_sweep(nominal(Scheme::kB), "eps_rho", {0.001, 0.01, 0.1}, 3);
    bool ok = true;
    std::string kd, ed;
    for (std::size_t i = 0; i < k_rows.size(); ++i) {
      if (i > 0) ok = ok && k_rows[i].tail_max_ef <= k_rows[i - 1].tail_max_ef;
      ok = ok && std::isfinite(k_rows[i].tail_max_ef);
      kd += (kd.empty() ? "" : " ") + fmt("%.5g", k_rows[i].tail_max_ef);
    }
    for (std::size_t i = 0; i < e_rows.size(); ++i) {
      if (i > 0) ok = ok && e_rows[i].bound >= e_rows[i - 1].bound;
      ed += (ed.empty() ? "" : " ") + fmt("%.4g", e_rows[i].bound);
    }
    report(12, "bound radius adjustable through kappa and eps_rho",
           {ok, "tail max |e_f| over kappa 1,2,4,8: [" + kd + "]; bound over eps_rho: [" + ed + "]"});
  }

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
