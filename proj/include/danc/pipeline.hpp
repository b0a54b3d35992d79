#pragma once

#include <optional>
#include <string>
#include <vector>

#include "danc/analysis.hpp"
#include "danc/scenario.hpp"
#include "danc/sim_engine.hpp"

namespace danc {

/// Ideal-weight fits of f(x_d) and g(x_d) on the run's network, filter
/// constants, and the gains as the checker is told them (kappa scaled by
/// kappa_report_scale).
ReportInputs make_report_inputs(const ClosedLoopSetup& setup);

/// Largest incremental-law residual tolerated per step.
inline constexpr double kResidualTolerance = 1e-12;
/// Largest basis difference tolerated by the data-flow audit.
inline constexpr double kBasisAuditTolerance = 1e-12;

struct Verification {
  SimResult sim;
  ReportInputs inputs;
  std::optional<BoundReport> report;  // absent when the run aborted
  std::vector<Lemma1Case> lemma1;
  std::vector<Lemma2Case> lemma2;
  std::vector<std::string> failures;  // one line per failed item

  bool pass() const { return failures.empty(); }
};

/// Simulate, check the theorem bounds, and optionally run the lemma suites.
Verification run_verification(const Scenario& scenario, bool with_lemmas = true);

/// Maximum |e_f| over the final tail_fraction of the trace.
double tail_max_abs_ef(const SimTrace& trace, double tail_fraction);

struct SweepRow {
  double value = 0.0;
  double tail_max_ef = 0.0;
  double ms_error = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

/// One verification per value, spread over `jobs` threads. Throws
/// ConfigError for an unknown axis or an empty value list.
std::vector<SweepRow> run_sweep(const Scenario& base, const std::string& axis,
                                const std::vector<double>& values, int jobs = 1);

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows);

}  // namespace danc
