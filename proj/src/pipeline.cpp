#include "danc/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "danc/error.hpp"

namespace danc {

ReportInputs make_report_inputs(const ClosedLoopSetup& setup) {
  const Scenario& sc = setup.scenario;
  ReportInputs in;
  in.scheme = sc.scheme;
  in.gains = setup.gains;
  in.gains.kappa *= sc.kappa_report_scale;
  in.fit_f = fit_ideal_weights(setup.plant.f, setup.traj, setup.net, sc.fit_grid_step, sc.ridge);
  in.fit_g = fit_ideal_weights(setup.plant.g, setup.traj, setup.net, sc.fit_grid_step, sc.ridge);
  in.filter = estimate_c1_c2(sc.lambda, sc.horizon);
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(sc.x0.data(), setup.plant.n);
  in.e0_norm_sq = (x0 - setup.traj.desired_state(0.0)).squaredNorm();
  in.ef0 = setup.plan.e_f0;
  in.delta = sc.delta;
  in.lf_true = setup.plant.lf_true;
  in.lg_true = setup.plant.lg_true;
  in.tail_fraction = sc.tail_fraction;
  in.horizon = sc.horizon;
  return in;
}

double tail_max_abs_ef(const SimTrace& trace, double tail_fraction) {
  const auto& t = trace.column("t");
  const auto& ef = trace.column("ef");
  if (t.empty()) return 0.0;
  const double start = (1.0 - tail_fraction) * t.back() - 1e-9 * std::max(1.0, t.back());
  double worst = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= start) worst = std::max(worst, std::abs(ef[k]));
  }
  return worst;
}

Verification run_verification(const Scenario& scenario, bool with_lemmas) {
  Verification v;
  const ClosedLoopSetup setup = build_setup(scenario);
  v.sim = run_closed_loop(setup);
  v.inputs = make_report_inputs(setup);
  if (!v.sim.completed()) {
    v.failures.push_back("run aborted: " + v.sim.diagnostic);
    return v;
  }

  const auto& et = v.sim.trace.column("et");
  const double et0_tol =
      4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(setup.plan.e_f0));
  if (et.empty() || std::abs(et.front()) > et0_tol) {
    v.failures.push_back("initial filtered-error offset is not zero");
  }
  if (scenario.scheme != Scheme::kA && v.sim.max_incremental_residual > kResidualTolerance) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "incremental-law residual %.3e above %.0e",
                  v.sim.max_incremental_residual, kResidualTolerance);
    v.failures.push_back(buf);
  }
  if (v.sim.max_basis_audit_error > kBasisAuditTolerance) {
    v.failures.push_back("basis data-flow audit: network input differs from x_d");
  }

  v.report = check_theorem_bounds(v.sim.trace, v.inputs, setup.plant, scenario.tau);
  for (const auto& c : v.report->checks) {
    if (c.counts && c.violations > 0) {
      v.failures.push_back("bound check " + c.name + ": " + std::to_string(c.violations) +
                           " violations");
    }
  }

  if (with_lemmas) {
    v.lemma1 = lemma1_random_suite(scenario.seed);
    v.lemma2 = lemma2_random_suite(scenario.seed);
    for (const auto& c : v.lemma1) {
      if (!c.positive) v.failures.push_back("lemma 1 case failed: " + c.description);
    }
    for (const auto& c : v.lemma2) {
      if (!c.verdict.pass) v.failures.push_back("lemma 2 case failed: " + c.description);
    }
  }
  return v;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const std::string& axis,
                                const std::vector<double>& values, int jobs) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  // Resolve every sub-scenario up front so bad input fails before any run.
  std::vector<Scenario> runs;
  for (double value : values) runs.push_back(with_axis_value(base, axis, value));

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = values[i];
      try {
        const Verification v = run_verification(runs[i], false);
        if (v.sim.completed()) {
          row.tail_max_ef = tail_max_abs_ef(v.sim.trace, runs[i].tail_fraction);
          row.ms_error = ms_output_error(v.sim.trace, v.sim.trace.column("t").back());
        } else {
          row.tail_max_ef = std::numeric_limits<double>::quiet_NaN();
          row.ms_error = std::numeric_limits<double>::quiet_NaN();
        }
        row.bound = steady_bound(v.inputs);
        row.pass = v.pass();
        if (!v.failures.empty()) row.note = v.failures.front();
      } catch (const Error& err) {
        row.pass = false;
        row.tail_max_ef = row.ms_error = row.bound = std::numeric_limits<double>::quiet_NaN();
        row.note = err.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::string out = axis + ",tail_max_ef,ms_error,bound,pass,note\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%d,", r.value, r.tail_max_ef,
                  r.ms_error, r.bound, r.pass ? 1 : 0);
    out += buf;
    // RFC 4180 quoting for the free-text note.
    std::string note = "\"";
    for (char c : r.note) {
      if (c == '"') note += '"';
      note += c;
    }
    out += note + "\"\n";
  }
  return out;
}

}  // namespace danc
