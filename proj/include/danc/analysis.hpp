#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "danc/controllers.hpp"
#include "danc/error_geometry.hpp"
#include "danc/plant.hpp"
#include "danc/rbf_net.hpp"
#include "danc/sim_engine.hpp"

namespace danc {

// ---------------------------------------------------------------- quadrature

/// Trapezoid integral of y over the sample times (non-uniform allowed).
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

/// Running trapezoid integral, out[0] = 0.
std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& y);

/// Trapezoid integral of y^2 over [a, b], linearly interpolating y at
/// window ends that fall between samples.
double integral_of_square(const std::vector<double>& t, const std::vector<double>& y,
                          double a, double b);

/// Centered differences with one-sided ends.
std::vector<double> finite_difference(const std::vector<double>& t,
                                      const std::vector<double>& y);

// ------------------------------------------------------------ trace metrics

/// (1/t) int_0^t e_1^2. Throws DomainError unless 0 < t <= last time.
double ms_output_error(const SimTrace& trace, double t);

/// int_{t - tau}^t signal^2. Throws DomainError for t < tau or t past the
/// trace; TraceFormatError for an unknown column.
double windowed_l2(const SimTrace& trace, const std::string& signal, double tau,
                   double t);

/// V(t) = int_0^t g(x) e~_f de~_f/ds ds by cumulative trapezoid, V(0) = 0.
std::vector<double> lyapunov_v(const SimTrace& trace, const PlantModel& plant);

// ------------------------------------------------------------------ lemmas

using ScalarFunction = std::function<double(double)>;

/// True iff int_0^t g(f(s)) f'(s) ds > 0 at every positive grid time
/// (composite Simpson, f' by finite differences). Throws PreconditionError
/// if sampling shows f(0) != 0, f <= 0, or g <= 0 on the grid.
bool lemma1_oracle(const ScalarFunction& g_fn, const ScalarFunction& f_fn,
                   const std::vector<double>& t_grid);

/// The quadrature behind lemma1_oracle, one value per grid time.
std::vector<double> lemma1_integrals(const ScalarFunction& g_fn,
                                     const ScalarFunction& f_fn,
                                     const std::vector<double>& t_grid);

struct Lemma2Options {
  double tail_fraction = 0.25;
  bool d_vanishes = false;   // also test s_k -> 0
  double tolerance = 1e-9;   // absolute slack on the limsup comparison
  double vanish_ratio = 1e-3;
};

struct Lemma2Verdict {
  double tail_max_s = 0.0;  // empirical limsup of s_k
  double max_s = 0.0;
  bool bounded_by_d_bar = false;
  bool vanishes = true;  // only meaningful with d_vanishes
  bool pass = false;
};

/// Checks r_k <= r_{k-1} - s_k + d_k (k >= 1), r, s >= 0 and |d_k| <= d_bar
/// (HypothesisError otherwise), then reports the tail behaviour of s.
Lemma2Verdict lemma2_check(const std::vector<double>& r, const std::vector<double>& s,
                           const std::vector<double>& d, double d_bar,
                           const Lemma2Options& options = {});

struct Lemma1Case {
  std::string description;
  bool positive = false;
  double min_integral = 0.0;
};

struct Lemma2Case {
  std::string description;
  Lemma2Verdict verdict;
};

/// Randomized (f, g) pairs, monotone and non-monotone f included.
std::vector<Lemma1Case> lemma1_random_suite(std::uint64_t seed, int count = 10);

/// Randomized hypothesis-satisfying sequences, half with bounded d and half
/// with vanishing d.
std::vector<Lemma2Case> lemma2_random_suite(std::uint64_t seed, int count = 100);

// ------------------------------------------------------------ bound formulas

/// B_ef = kappa^{-1/2} (eps_rho + (sigma_f |W*_f|^2 + sigma_g |W*_g|^2)/2
///        + eta eps_f^2 + eta eps_g^2)^{1/2}.
double uub_bound(const ControllerGains& gains, const IdealFit& fit_f, const IdealFit& fit_g);

/// Epsilon of the incremental schemes. Scheme C adds the Lipschitz-gain
/// leakage terms sigma_l l^2 / 2 and uses eta_f, eta_g. Throws
/// PreconditionError for scheme A.
double epsilon_bound(const ControllerGains& gains, const IdealFit& fit_f,
                     const IdealFit& fit_g, Scheme scheme, double lf_true = 0.0,
                     double lg_true = 0.0);

/// Everything the theorem checks need besides the trace.
struct ReportInputs {
  Scheme scheme = Scheme::kB;
  ControllerGains gains;  // as reported to the checker
  IdealFit fit_f;
  IdealFit fit_g;
  FilterConstants filter;
  double e0_norm_sq = 0.0;
  double ef0 = 0.0;
  double delta = 1.0;
  double lf_true = 0.0;
  double lg_true = 0.0;
  double tail_fraction = 0.2;
  double horizon = 0.0;
};

/// Steady radius: B_ef for A, sqrt(eps / kappa) for B and C.
double steady_bound(const ReportInputs& in);

/// Epsilon of the variant (A: kappa B_ef^2, which is the same sum).
double variant_epsilon(const ReportInputs& in);

/// Initial-condition term varpi_0 of the mean-square inequality, with zero
/// initial estimates so W~(0) = -W* and l~(0) = -l.
double varpi0(const ReportInputs& in);

// -------------------------------------------------------------- the report

inline constexpr double kUubSlack = 1.05;
inline constexpr double kWindowSlack = 1.05;
inline constexpr double kMsStart = 0.1;
inline constexpr int kEntrySteps = 50;

struct Violation {
  std::string check;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CheckSummary {
  std::string name;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  double worst_t = 0.0;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();  // rhs / lhs
  bool counts = true;  // false: advisory, never enters the verdict
};

struct BoundReport {
  Scheme scheme = Scheme::kB;
  double b_ef = 0.0;          // steady radius actually checked
  double eps_total = 0.0;
  double varpi0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double t_detected = 0.0;    // first sustained entry, +inf if none
  double t_entry = 0.0;       // max(t_detected, delta)
  std::vector<double> ms_times;
  std::vector<double> ms_lhs;
  std::vector<double> ms_bound_curve;
  std::vector<Violation> violations;  // counting checks only
  std::vector<CheckSummary> checks;

  bool pass() const { return violations.empty(); }
  const CheckSummary* find(const std::string& name) const;
};

/// First time after which |e~_f| stays within kUubSlack * bound for
/// kEntrySteps consecutive samples; +inf if that never happens.
double detect_entry_time(const SimTrace& trace, double bound);

/// UUB after max(T, delta), mean-square inequality from t = 0.1, windowed
/// tails of e_f (and W~, l~ for the incremental schemes), the c1/c2 relation
/// itself, plus advisory Lyapunov positivity and dissipation audits.
BoundReport check_theorem_bounds(const SimTrace& trace, const ReportInputs& inputs,
                                 const PlantModel& plant, double tau);

std::string report_text(const BoundReport& report);

/// Rows of (check, t, lhs, rhs, margin): every violation plus the
/// worst-margin point of each check.
std::string report_csv(const BoundReport& report);

// ------------------------------------------------- approximation comparison

struct ApproximationComparison {
  std::vector<double> radii;
  std::vector<double> conventional_residual;  // max residual on each box
  std::vector<double> da_eps_bar;             // DA fit, recomputed per box
  Eigen::Index nodes = 0;
};

/// Conventional fits over state boxes [-r, r]^n with per_axis^n centers
/// spread over each box, against the DA fit on Omega_d with the same node
/// count. `samples_per_axis` sets the state-sample grid of each box.
ApproximationComparison approximation_comparison(const TargetFunction& target,
                                                 const DesiredTrajectory& traj,
                                                 int per_axis, double grid_step,
                                                 const std::vector<double>& radii,
                                                 int samples_per_axis = 21,
                                                 double ridge = kDefaultRidge);

}  // namespace danc
