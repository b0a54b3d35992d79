#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "danc/error.hpp"
#include "danc/error_geometry.hpp"
#include "danc/pipeline.hpp"
#include "danc/scenario.hpp"
#include "danc/sim_engine.hpp"

namespace danc::cli {

namespace fs = std::filesystem;

namespace {

bool is_config_error(const std::exception& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidFilterError*>(&e) ||
         dynamic_cast<const InvalidPlanError*>(&e) || dynamic_cast<const ShapeError*>(&e) ||
         dynamic_cast<const FitError*>(&e);
}

// Runs `body`, mapping library exceptions to exit codes.
template <class Body>
int guarded(std::ostream& err, const Body& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e) ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

Scenario load_with_overrides(const RunOptions& opts) {
  Scenario s = load_scenario(opts.config);
  if (opts.out_dir) s.out_dir = *opts.out_dir;
  if (opts.verbose_trace) s.verbose_trace = true;
  if (opts.seed) s.seed = *opts.seed;
  return s;
}

fs::path prepare_out_dir(const Scenario& s) {
  const fs::path dir(s.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string run_summary(const Scenario& s, const SimResult& sim, const FilterConstants& fc,
                        double e0_norm_sq) {
  std::ostringstream out;
  out.precision(10);
  out << "plant " << s.plant << ", scheme " << to_string(s.scheme) << "\n";
  out << "steps " << sim.trace.rows() << " (h = " << s.h << ", horizon = " << s.horizon
      << ")\n";
  out << "status " << (sim.completed() ? "completed" : "aborted: " + sim.diagnostic) << "\n";
  out << "c1 " << fc.c1 << "\n";
  out << "c2 " << fc.c2(e0_norm_sq) << "\n";
  if (sim.trace.rows() > 0) {
    out << "final |e_f| " << std::abs(sim.trace.column("ef").back()) << "\n";
  }
  out << "max incremental residual " << sim.max_incremental_residual << "\n";
  out << "max basis audit error " << sim.max_basis_audit_error << "\n";
  return out.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

int cmd_simulate(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_with_overrides(opts);
    const ClosedLoopSetup setup = build_setup(s);
    const SimResult sim = run_closed_loop(setup);
    const fs::path dir = prepare_out_dir(s);
    const fs::path trace_path = dir / s.trace_file;
    write_trace_csv(sim.trace, trace_path.string(), s.verbose_trace);

    const FilterConstants fc = estimate_c1_c2(s.lambda, s.horizon);
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(s.x0.data(), setup.plant.n);
    const double e0_sq = (x0 - setup.traj.desired_state(0.0)).squaredNorm();
    write_text(dir / "summary.txt", run_summary(s, sim, fc, e0_sq));
    if (!sim.completed()) {
      err << "error: " << sim.diagnostic << "\n";
      return kExitRuntime;
    }
    out << "wrote " << trace_path.string() << " (" << sim.trace.rows() << " rows)\n";
    return kExitOk;
  });
}

int cmd_verify(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_with_overrides(opts);
    const Verification v = run_verification(s, true);
    const fs::path dir = prepare_out_dir(s);
    write_trace_csv(v.sim.trace, (dir / s.trace_file).string(), s.verbose_trace);

    std::ostringstream text;
    if (v.report) text << report_text(*v.report);
    std::size_t lemma1_ok = 0, lemma2_ok = 0;
    for (const auto& c : v.lemma1) lemma1_ok += c.positive ? 1 : 0;
    for (const auto& c : v.lemma2) lemma2_ok += c.verdict.pass ? 1 : 0;
    text << "lemma 1 suite: " << lemma1_ok << "/" << v.lemma1.size() << " positive\n";
    text << "lemma 2 suite: " << lemma2_ok << "/" << v.lemma2.size() << " pass\n";
    text << "incremental residual max " << v.sim.max_incremental_residual << "\n";
    for (const auto& f : v.failures) text << "FAIL " << f << "\n";
    text << (v.pass() ? "VERDICT PASS\n" : "VERDICT FAIL\n");
    write_text(dir / "report.txt", text.str());
    if (v.report) write_text(dir / "report.csv", report_csv(*v.report));
    out << text.str();

    if (!v.sim.completed()) {
      err << "error: " << v.sim.diagnostic << "\n";
      return kExitRuntime;
    }
    return v.pass() ? kExitOk : kExitBound;
  });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_with_overrides(opts.run);
    if (opts.values.empty()) throw ConfigError("sweep needs at least one value");
    const std::vector<SweepRow> rows = run_sweep(s, opts.axis, opts.values, opts.jobs);
    const fs::path dir = prepare_out_dir(s);
    const fs::path path = dir / ("sweep_" + opts.axis + ".csv");
    const std::string csv = sweep_csv(opts.axis, rows);
    write_text(path, csv);
    out << csv;
    for (const auto& r : rows) {
      if (!r.pass) return kExitBound;
    }
    return kExitOk;
  });
}

int cmd_plotdata(const PlotOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!fs::exists(opts.trace)) throw ConfigError("trace file '" + opts.trace + "' not found");
    const SimTrace trace = read_trace_csv(opts.trace);
    if (opts.columns.empty()) throw ConfigError("no columns requested");
    for (const auto& c : opts.columns) {
      if (!trace.has_column(c)) {
        std::string avail;
        for (const auto& n : trace.names()) avail += (avail.empty() ? "" : ", ") + n;
        throw ConfigError("trace has no column '" + c + "'; available: " + avail);
      }
    }
    const fs::path dir = opts.out_dir ? fs::path(*opts.out_dir)
                                      : fs::path(opts.trace).parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    const auto& t = trace.column("t");
    char buf[64];
    for (const auto& c : opts.columns) {
      const auto& y = trace.column(c);
      std::string body = "t," + c + "\n";
      for (std::size_t k = 0; k < t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e\n", t[k], y[k]);
        body += buf;
      }
      const fs::path path = dir / (c + ".csv");
      write_text(path, body);
      out << "wrote " << path.string() << "\n";
    }
    return kExitOk;
  });
}

int cmd_lemmas(std::uint64_t seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    bool ok = true;
    for (const auto& c : lemma1_random_suite(seed)) {
      out << (c.positive ? "PASS" : "FAIL") << " lemma1 " << c.description
          << " (min integral " << c.min_integral << ")\n";
      ok = ok && c.positive;
    }
    std::size_t passed = 0;
    const auto cases = lemma2_random_suite(seed);
    for (const auto& c : cases) {
      if (c.verdict.pass) {
        ++passed;
      } else {
        out << "FAIL lemma2 " << c.description << " (tail max s " << c.verdict.tail_max_s
            << ")\n";
      }
    }
    out << "lemma2 " << passed << "/" << cases.size() << " sequences pass\n";
    ok = ok && passed == cases.size();
    return ok ? kExitOk : kExitBound;
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Desired-approximation adaptive neural control simulator"};
  app.require_subcommand(1);

  RunOptions run;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", run.config, "Scenario file")->required();
    sub->add_option("--out-dir", out_dir, "Output directory (overrides the config)");
    sub->add_flag("--verbose-trace", run.verbose_trace, "Log controller internals and weights");
    sub->add_option("--seed", seed, "Seed for randomized verification probes");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Run one closed loop and write its trace");
  add_run_flags(simulate);
  CLI::App* verify = app.add_subcommand("verify", "Simulate and check every bound");
  add_run_flags(verify);

  SweepOptions sweep;
  std::string values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Verify once per value of one parameter");
  add_run_flags(sweep_cmd);
  sweep_cmd->add_option("--axis", sweep.axis, "Parameter to vary")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  PlotOptions plot;
  std::string columns;
  CLI::App* plotdata = app.add_subcommand("plotdata", "Split trace columns into (t, y) files");
  plotdata->add_option("--trace", plot.trace, "Trace CSV")->required();
  plotdata->add_option("--columns", columns, "Comma-separated column names")->required();
  plotdata->add_option("--out-dir", out_dir, "Output directory");

  std::uint64_t lemma_seed = 1;
  CLI::App* lemmas = app.add_subcommand("lemmas", "Run the randomized lemma suites");
  lemmas->add_option("--seed", lemma_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  auto finish_run = [&](CLI::App* sub) {
    if (sub->count("--out-dir")) run.out_dir = out_dir;
    if (sub->count("--seed")) run.seed = seed;
  };

  if (*simulate) {
    finish_run(simulate);
    return cmd_simulate(run, std::cout, std::cerr);
  }
  if (*verify) {
    finish_run(verify);
    return cmd_verify(run, std::cout, std::cerr);
  }
  if (*sweep_cmd) {
    finish_run(sweep_cmd);
    sweep.run = run;
    for (const auto& v : split_list(values)) {
      try {
        std::size_t used = 0;
        sweep.values.push_back(std::stod(v, &used));
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        std::cerr << "error: sweep value '" << v << "' is not a number\n";
        return kExitConfig;
      }
    }
    return cmd_sweep(sweep, std::cout, std::cerr);
  }
  if (*plotdata) {
    if (plotdata->count("--out-dir")) plot.out_dir = out_dir;
    plot.columns = split_list(columns);
    return cmd_plotdata(plot, std::cout, std::cerr);
  }
  return cmd_lemmas(lemma_seed, std::cout, std::cerr);
}

}  // namespace danc::cli
