#include "danc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "danc/error.hpp"

namespace danc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_series(const std::vector<double>& t, const std::vector<double>& y) {
  require_same_size(t.size(), y.size(), "quadrature samples");
}

// Trapezoid integral of phi(y) over [a, b], y linear between samples.
template <class Phi>
double window_integral(const std::vector<double>& t, const std::vector<double>& y,
                       double a, double b, const Phi& phi) {
  require_series(t, y);
  if (t.size() < 2 || b <= a) return 0.0;
  auto value_at = [&](std::size_t i, double s) {
    const double w = (s - t[i]) / (t[i + 1] - t[i]);
    return y[i] + w * (y[i + 1] - y[i]);
  };
  // First segment whose right end is past a.
  std::size_t i = static_cast<std::size_t>(
      std::upper_bound(t.begin(), t.end(), a) - t.begin());
  i = i == 0 ? 0 : i - 1;
  double total = 0.0;
  for (; i + 1 < t.size() && t[i] < b; ++i) {
    const double lo = std::max(a, t[i]);
    const double hi = std::min(b, t[i + 1]);
    if (hi <= lo) continue;
    const double ylo = lo == t[i] ? y[i] : value_at(i, lo);
    const double yhi = hi == t[i + 1] ? y[i + 1] : value_at(i, hi);
    total += 0.5 * (hi - lo) * (phi(ylo) + phi(yhi));
  }
  return total;
}

double square(double v) { return v * v; }

double time_tolerance(const std::vector<double>& t) {
  return t.empty() ? 0.0 : 1e-9 * std::max(1.0, std::abs(t.back()));
}

}  // namespace

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  require_series(t, y);
  double total = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    total += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  }
  return total;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                         const std::vector<double>& y) {
  require_series(t, y);
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  }
  return out;
}

double integral_of_square(const std::vector<double>& t, const std::vector<double>& y,
                          double a, double b) {
  return window_integral(t, y, a, b, square);
}

std::vector<double> finite_difference(const std::vector<double>& t,
                                      const std::vector<double>& y) {
  require_series(t, y);
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / (t[1] - t[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  return d;
}

double ms_output_error(const SimTrace& trace, double t) {
  const auto& times = trace.column("t");
  if (!(t > 0.0)) throw DomainError("mean-square error needs t > 0");
  if (times.empty() || t > times.back() + time_tolerance(times)) {
    throw DomainError("mean-square error requested past the end of the trace");
  }
  return integral_of_square(times, trace.column("e1"), 0.0, t) / t;
}

double windowed_l2(const SimTrace& trace, const std::string& signal, double tau,
                   double t) {
  const auto& times = trace.column("t");
  const auto& y = trace.column(signal);
  const double tol = time_tolerance(times);
  if (!(tau > 0.0)) throw DomainError("window length tau must be > 0");
  if (t < tau - tol) throw DomainError("windowed L2 needs t >= tau");
  if (times.empty() || t > times.back() + tol) {
    throw DomainError("windowed L2 requested past the end of the trace");
  }
  return integral_of_square(times, y, std::max(0.0, t - tau), t);
}

std::vector<double> lyapunov_v(const SimTrace& trace, const PlantModel& plant) {
  const auto& times = trace.column("t");
  const auto& et = trace.column("et");
  std::vector<const std::vector<double>*> xs;
  for (int i = 1; i <= plant.n; ++i) xs.push_back(&trace.column("x" + std::to_string(i)));
  const std::vector<double> det = finite_difference(times, et);
  std::vector<double> integrand(times.size());
  Eigen::VectorXd x(plant.n);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (int i = 0; i < plant.n; ++i) x[i] = (*xs[static_cast<std::size_t>(i)])[k];
    integrand[k] = plant.g(x) * et[k] * det[k];
  }
  return cumulative_trapezoid(times, integrand);
}

// ------------------------------------------------------------------ lemmas

std::vector<double> lemma1_integrals(const ScalarFunction& g_fn,
                                     const ScalarFunction& f_fn,
                                     const std::vector<double>& t_grid) {
  if (std::abs(f_fn(0.0)) > 1e-12) {
    throw PreconditionError("lemma 1 needs f(0) = 0");
  }
  for (double t : t_grid) {
    if (t < 0.0) throw PreconditionError("lemma 1 grid must be non-negative");
    if (t == 0.0) continue;
    const double f = f_fn(t);
    if (!(f > 0.0)) throw PreconditionError("lemma 1 needs f(t) > 0 on the grid");
    if (!(g_fn(f) > 0.0)) throw PreconditionError("lemma 1 needs g > 0 on the grid");
  }
  auto fprime = [&](double s, double scale) {
    const double d = 1e-5 * std::max(1.0, scale);
    if (s <= d) {
      // Second-order forward difference at the left end.
      return (-3.0 * f_fn(s) + 4.0 * f_fn(s + d) - f_fn(s + 2.0 * d)) / (2.0 * d);
    }
    return (f_fn(s + d) - f_fn(s - d)) / (2.0 * d);
  };
  constexpr int kPanels = 256;  // even, for Simpson
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t == 0.0) {
      out.push_back(0.0);
      continue;
    }
    const double hs = t / kPanels;
    double sum = 0.0;
    for (int j = 0; j <= kPanels; ++j) {
      const double s = j * hs;
      const double w = (j == 0 || j == kPanels) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      sum += w * g_fn(f_fn(s)) * fprime(s, t);
    }
    out.push_back(sum * hs / 3.0);
  }
  return out;
}

bool lemma1_oracle(const ScalarFunction& g_fn, const ScalarFunction& f_fn,
                   const std::vector<double>& t_grid) {
  const std::vector<double> vals = lemma1_integrals(g_fn, f_fn, t_grid);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (t_grid[i] > 0.0 && !(vals[i] > 0.0)) return false;
  }
  return true;
}

Lemma2Verdict lemma2_check(const std::vector<double>& r, const std::vector<double>& s,
                           const std::vector<double>& d, double d_bar,
                           const Lemma2Options& options) {
  require_same_size(r.size(), s.size(), "lemma 2 sequences r, s");
  require_same_size(r.size(), d.size(), "lemma 2 sequences r, d");
  if (r.size() < 2) throw PreconditionError("lemma 2 needs at least two terms");
  if (!(d_bar >= 0.0)) throw PreconditionError("d_bar must be >= 0");
  const double d_slack = 1e-12 * std::max(1.0, d_bar);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] < 0.0 || s[k] < 0.0) {
      throw HypothesisError("lemma 2 needs r_k, s_k >= 0 (index " + std::to_string(k) + ")");
    }
    if (std::abs(d[k]) > d_bar + d_slack) {
      throw HypothesisError("|d_k| exceeds d_bar at index " + std::to_string(k));
    }
    if (k == 0) continue;
    const double slack =
        1e-12 * (1.0 + std::abs(r[k - 1]) + std::abs(s[k]) + std::abs(d[k]));
    if (r[k] > r[k - 1] - s[k] + d[k] + slack) {
      throw HypothesisError("r_k <= r_{k-1} - s_k + d_k fails at index " +
                            std::to_string(k));
    }
  }
  Lemma2Verdict v;
  const auto tail_start = static_cast<std::size_t>(
      std::floor((1.0 - options.tail_fraction) * static_cast<double>(s.size())));
  v.max_s = *std::max_element(s.begin(), s.end());
  v.tail_max_s = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(
                                                   std::min(tail_start, s.size() - 1)),
                                   s.end());
  v.bounded_by_d_bar = v.tail_max_s <= d_bar + options.tolerance;
  v.vanishes = !options.d_vanishes ||
               v.tail_max_s <= options.vanish_ratio * v.max_s + options.tolerance;
  v.pass = v.bounded_by_d_bar && v.vanishes;
  return v;
}

namespace {

struct NamedFn {
  std::string name;
  ScalarFunction fn;
};

}  // namespace

std::vector<Lemma1Case> lemma1_random_suite(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Lemma1Case> out;
  for (int i = 0; i < count; ++i) {
    NamedFn f;
    double t_end = 5.0;
    switch (i % 5) {
      case 0: {
        const double a = between(0.2, 3.0), p = between(1.0, 3.0);
        f = {"a t^p", [a, p](double t) { return a * std::pow(std::abs(t), p); }};
        break;
      }
      case 1: {
        const double a = between(0.5, 3.0), b = between(0.3, 2.0);
        f = {"a t exp(-b t)", [a, b](double t) { return a * t * std::exp(-b * t); }};
        break;
      }
      case 2: {
        const double a = between(0.5, 2.0), c = between(1.0, 4.0);
        f = {"a t (c - t)", [a, c](double t) { return a * t * (c - t); }};
        t_end = 0.98 * c;
        break;
      }
      case 3: {
        const double a = between(0.5, 2.0), b = between(0.3, 3.0);
        f = {"a (1 - exp(-b t))", [a, b](double t) { return a * (1.0 - std::exp(-b * t)); }};
        break;
      }
      default: {
        const double a = between(0.5, 2.0), w = between(2.0, 8.0);
        f = {"a t (1 + sin(w t) / 2)",
             [a, w](double t) { return a * t * (1.0 + 0.5 * std::sin(w * t)); }};
        break;
      }
    }
    NamedFn g;
    switch (static_cast<int>(unit(rng) * 4.0)) {
      case 0: {
        const double d = between(0.1, 1.0), c = d + between(0.1, 2.0);
        g = {"c + d sin(y)", [c, d](double y) { return c + d * std::sin(y); }};
        break;
      }
      case 1: {
        const double c = between(0.1, 2.0);
        g = {"c + y^2", [c](double y) { return c + y * y; }};
        break;
      }
      case 2: {
        const double c = between(0.5, 2.0), b = between(0.1, 1.0);
        g = {"c exp(-b y)", [c, b](double y) { return c * std::exp(-b * y); }};
        break;
      }
      default: {
        const double c = between(0.2, 2.0);
        g = {"1 / (c + y^2)", [c](double y) { return 1.0 / (c + y * y); }};
        break;
      }
    }
    std::vector<double> grid;
    for (int k = 1; k <= 100; ++k) grid.push_back(t_end * k / 100.0);
    const std::vector<double> vals = lemma1_integrals(g.fn, f.fn, grid);
    Lemma1Case c;
    c.description = "f = " + f.name + ", g = " + g.name;
    c.min_integral = *std::min_element(vals.begin(), vals.end());
    c.positive = c.min_integral > 0.0;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Lemma2Case> lemma2_random_suite(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Lemma2Case> out;
  for (int i = 0; i < count; ++i) {
    const bool vanishing = i >= count / 2;
    const std::size_t len = vanishing ? 2000 : 1000;
    const double alpha = between(0.05, 0.9);
    const double d_bar = between(0.01, 1.0);
    const double rho = between(0.95, 0.99);
    std::vector<double> r(len), s(len), d(len);
    r[0] = between(0.0, 10.0);
    s[0] = 0.0;
    d[0] = 0.0;
    double scale = 1.0;
    for (std::size_t k = 1; k < len; ++k) {
      scale *= vanishing ? rho : 1.0;
      double dk = d_bar * scale * between(-1.0, 1.0);
      dk = std::max(dk, -r[k - 1]);  // keeps r_{k-1} + d_k >= 0
      const double pool = r[k - 1] + dk;
      d[k] = dk;
      s[k] = alpha * pool;
      const double slack = 0.1 * unit(rng) * (1.0 - alpha) * pool;
      r[k] = std::max(0.0, (1.0 - alpha) * pool - slack);
    }
    Lemma2Options opts;
    opts.d_vanishes = vanishing;
    Lemma2Case c;
    std::ostringstream desc;
    desc << (vanishing ? "vanishing d" : "bounded d") << ", alpha=" << alpha
         << ", d_bar=" << d_bar;
    c.description = desc.str();
    c.verdict = lemma2_check(r, s, d, d_bar, opts);
    out.push_back(std::move(c));
  }
  return out;
}

// ------------------------------------------------------------ bound formulas

double uub_bound(const ControllerGains& g, const IdealFit& fit_f, const IdealFit& fit_g) {
  const double sum = g.eps_rho +
                     0.5 * (g.sigma_f * fit_f.w_star.squaredNorm() +
                            g.sigma_g * fit_g.w_star.squaredNorm()) +
                     g.eta * fit_f.eps_bar * fit_f.eps_bar +
                     g.eta * fit_g.eps_bar * fit_g.eps_bar;
  return std::sqrt(sum / g.kappa);
}

double epsilon_bound(const ControllerGains& g, const IdealFit& fit_f,
                     const IdealFit& fit_g, Scheme scheme, double lf_true,
                     double lg_true) {
  const double leak = 0.5 * (g.sigma_f * fit_f.w_star.squaredNorm() +
                             g.sigma_g * fit_g.w_star.squaredNorm());
  const double ef2 = fit_f.eps_bar * fit_f.eps_bar;
  const double eg2 = fit_g.eps_bar * fit_g.eps_bar;
  switch (scheme) {
    case Scheme::kB:
      return g.eps_rho + g.eta * ef2 + g.eta * eg2 + leak;
    case Scheme::kC:
      return g.eps_rho + g.eta_f * ef2 + g.eta_g * eg2 + leak +
             0.5 * g.sigma_lf * lf_true * lf_true + 0.5 * g.sigma_lg * lg_true * lg_true;
    case Scheme::kA:
      break;
  }
  throw PreconditionError("epsilon_bound applies to the incremental schemes B and C");
}

double variant_epsilon(const ReportInputs& in) {
  if (in.scheme == Scheme::kA) {
    const double b = uub_bound(in.gains, in.fit_f, in.fit_g);
    return in.gains.kappa * b * b;
  }
  return epsilon_bound(in.gains, in.fit_f, in.fit_g, in.scheme, in.lf_true, in.lg_true);
}

double steady_bound(const ReportInputs& in) {
  if (in.scheme == Scheme::kA) return uub_bound(in.gains, in.fit_f, in.fit_g);
  return std::sqrt(variant_epsilon(in) / in.gains.kappa);
}

double varpi0(const ReportInputs& in) {
  const ControllerGains& g = in.gains;
  auto weighted = [](const Eigen::VectorXd& w, const Eigen::VectorXd& gamma) {
    return (w.array().square() / gamma.array()).sum();
  };
  // W~(0) = 0 - W*.
  const double wf = weighted(in.fit_f.w_star, g.gamma_f);
  const double wg = weighted(in.fit_g.w_star, g.gamma_g);
  double v = (wf + wg) / g.kappa + 2.0 * in.ef0 * in.ef0 * in.delta;
  if (in.scheme == Scheme::kA) return v;
  v += g.tau * (wf + wg) / g.kappa;
  if (in.scheme == Scheme::kB) return v;
  const double lf2 = in.lf_true * in.lf_true;
  const double lg2 = in.lg_true * in.lg_true;
  // l~(0) = 0 - l.
  v += lf2 / (g.kappa * g.gamma_lf) + lg2 / (g.kappa * g.gamma_lg);
  v += g.tau * lf2 / (g.kappa * g.gamma_lf) + g.tau * lg2 / (g.kappa * g.gamma_lg);
  return v;
}

// -------------------------------------------------------------- the report

const CheckSummary* BoundReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

double detect_entry_time(const SimTrace& trace, double bound) {
  const auto& t = trace.column("t");
  const auto& et = trace.column("et");
  const double limit = kUubSlack * bound;
  std::size_t run = 0;
  for (std::size_t k = 0; k < et.size(); ++k) {
    run = std::abs(et[k]) <= limit ? run + 1 : 0;
    if (run == static_cast<std::size_t>(kEntrySteps)) return t[k + 1 - run];
  }
  return kInf;
}

namespace {

class CheckRecorder {
 public:
  CheckRecorder(BoundReport& report, std::string name, bool counts)
      : report_(report) {
    summary_.name = std::move(name);
    summary_.counts = counts;
  }

  void add(double t, double lhs, double rhs) {
    ++summary_.evaluated;
    const double margin = lhs > 0.0 ? rhs / lhs : kInf;
    if (summary_.evaluated == 1 || margin < summary_.min_margin) {
      summary_.min_margin = margin;
      summary_.worst_t = t;
      summary_.worst_lhs = lhs;
      summary_.worst_rhs = rhs;
    }
    if (!(lhs <= rhs)) {
      ++summary_.violations;
      if (summary_.counts) report_.violations.push_back({summary_.name, t, lhs, rhs});
    }
  }

  // Records a failure even when lhs <= rhs, e.g. a band that was never entered.
  void fail(double t, double lhs, double rhs) {
    ++summary_.evaluated;
    ++summary_.violations;
    summary_.min_margin = 0.0;
    summary_.worst_t = t;
    summary_.worst_lhs = lhs;
    summary_.worst_rhs = rhs;
    if (summary_.counts) report_.violations.push_back({summary_.name, t, lhs, rhs});
  }

  ~CheckRecorder() { report_.checks.push_back(summary_); }

 private:
  BoundReport& report_;
  CheckSummary summary_;
};

std::vector<double> weight_error_series(const std::vector<Eigen::VectorXd>& w,
                                        const Eigen::VectorXd& w_star) {
  std::vector<double> out;
  out.reserve(w.size());
  for (const auto& v : w) out.push_back((v - w_star).squaredNorm());
  return out;
}

// Windowed integral of an already-squared series.
double window_plain(const std::vector<double>& t, const std::vector<double>& y,
                    double a, double b) {
  return window_integral(t, y, a, b, [](double v) { return v; });
}

}  // namespace

BoundReport check_theorem_bounds(const SimTrace& trace, const ReportInputs& in,
                                 const PlantModel& plant, double tau) {
  for (const char* c : {"t", "e1", "ef", "et"}) {
    if (!trace.has_column(c)) {
      throw TraceFormatError(std::string("trace is missing column '") + c + "'");
    }
  }
  const auto& t = trace.column("t");
  if (t.size() < 2) throw TraceFormatError("trace needs at least two rows");
  const auto& e1 = trace.column("e1");
  const auto& ef = trace.column("ef");
  const auto& et = trace.column("et");
  const double tol = time_tolerance(t);

  BoundReport rep;
  rep.scheme = in.scheme;
  rep.b_ef = steady_bound(in);
  rep.eps_total = variant_epsilon(in);
  rep.varpi0 = varpi0(in);
  rep.c1 = in.filter.c1;
  rep.c2 = in.filter.c2(in.e0_norm_sq);
  rep.t_detected = detect_entry_time(trace, rep.b_ef);
  rep.t_entry = std::max(rep.t_detected, in.delta);

  const double bound = rep.b_ef;
  const double bound_sq = bound * bound;

  {
    CheckRecorder uub(rep, "uub", true);
    if (!std::isfinite(rep.t_entry)) {
      // Never settled inside the slack band: report the largest excursion.
      double worst = 0.0, worst_t = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= in.delta - tol && std::abs(ef[k]) > worst) {
          worst = std::abs(ef[k]);
          worst_t = t[k];
        }
      }
      uub.fail(worst_t, worst, kUubSlack * bound);
    } else {
      for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= rep.t_entry - tol) uub.add(t[k], std::abs(ef[k]), kUubSlack * bound);
      }
    }
  }

  {
    CheckRecorder ms(rep, "mean_square", true);
    std::vector<double> e1_sq(e1.size());
    for (std::size_t k = 0; k < e1.size(); ++k) e1_sq[k] = e1[k] * e1[k];
    const std::vector<double> cum = cumulative_trapezoid(t, e1_sq);
    const double transient = rep.c1 * rep.varpi0 + rep.c2;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < kMsStart - tol) continue;
      const double lhs = cum[k] / t[k];
      const double rhs = transient / t[k] + 2.0 * rep.c1 * bound_sq;
      rep.ms_times.push_back(t[k]);
      rep.ms_lhs.push_back(lhs);
      rep.ms_bound_curve.push_back(rhs);
      ms.add(t[k], lhs, rhs * (1.0 + 1e-12));
    }
  }

  {
    // The filter constants themselves: int e1^2 <= c1 int e_f^2 + c2.
    CheckRecorder audit(rep, "c1_c2_relation", true);
    std::vector<double> e1_sq(e1.size()), ef_sq(ef.size());
    for (std::size_t k = 0; k < e1.size(); ++k) {
      e1_sq[k] = e1[k] * e1[k];
      ef_sq[k] = ef[k] * ef[k];
    }
    const std::vector<double> c_e1 = cumulative_trapezoid(t, e1_sq);
    const std::vector<double> c_ef = cumulative_trapezoid(t, ef_sq);
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double rhs = rep.c1 * c_ef[k] + rep.c2;
      audit.add(t[k], c_e1[k], rhs * (1.0 + 1e-9) + 1e-15);
    }
  }

  const double tail_start = (1.0 - in.tail_fraction) * t.back();
  auto tail_times = [&](auto&& fn) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] >= tail_start - tol && t[k] >= tau - tol) fn(k);
    }
  };

  {
    CheckRecorder win(rep, "window_ef", true);
    tail_times([&](std::size_t k) {
      win.add(t[k], integral_of_square(t, ef, t[k] - tau, t[k]),
              kWindowSlack * tau * bound_sq);
    });
  }

  const bool have_weights = trace.w_f.size() == t.size() && trace.w_g.size() == t.size();
  if (in.scheme != Scheme::kA && have_weights) {
    const double eps = rep.eps_total;
    const std::vector<double> wf = weight_error_series(trace.w_f, in.fit_f.w_star);
    const std::vector<double> wg = weight_error_series(trace.w_g, in.fit_g.w_star);
    CheckRecorder cf(rep, "window_wf", true);
    CheckRecorder cg(rep, "window_wg", true);
    tail_times([&](std::size_t k) {
      cf.add(t[k], window_plain(t, wf, t[k] - tau, t[k]),
             kWindowSlack * 2.0 * tau * eps / in.gains.sigma_f);
      cg.add(t[k], window_plain(t, wg, t[k] - tau, t[k]),
             kWindowSlack * 2.0 * tau * eps / in.gains.sigma_g);
    });
  }
  if (in.scheme == Scheme::kC) {
    const double eps = rep.eps_total;
    const auto& lf = trace.column("lf_hat");
    const auto& lg = trace.column("lg_hat");
    std::vector<double> lf_err(lf.size()), lg_err(lg.size());
    for (std::size_t k = 0; k < lf.size(); ++k) {
      lf_err[k] = lf[k] - in.lf_true;
      lg_err[k] = lg[k] - in.lg_true;
    }
    CheckRecorder cf(rep, "window_lf", true);
    CheckRecorder cg(rep, "window_lg", true);
    tail_times([&](std::size_t k) {
      cf.add(t[k], integral_of_square(t, lf_err, t[k] - tau, t[k]),
             kWindowSlack * 2.0 * tau * eps / in.gains.sigma_lf);
      cg.add(t[k], integral_of_square(t, lg_err, t[k] - tau, t[k]),
             kWindowSlack * 2.0 * tau * eps / in.gains.sigma_lg);
    });
  }

  // Advisory audits. With a time-varying g(x(t)) the integral function is not
  // a function of e~_f alone, so positivity is an observation, not a theorem.
  const std::vector<double> v = lyapunov_v(trace, plant);
  {
    double scale = 1.0;
    for (std::size_t k = 0; k < t.size(); ++k) scale = std::max(scale, std::abs(v[k]));
    const double floor_tol = 1e-6 * scale;
    CheckRecorder pos(rep, "lyapunov_positive", false);
    for (std::size_t k = 1; k < t.size(); ++k) {
      // lhs <= rhs form: -V <= tol, and -V < 0 where the error is visible.
      const double rhs = std::abs(et[k]) > 0.01 ? 0.0 : floor_tol;
      pos.add(t[k], -v[k], rhs);
    }
  }
  if (have_weights) {
    // L(t) with the fitted W* standing in for the unknown ideal weights.
    std::vector<double> lyap(t.size());
    const Eigen::VectorXd& gf = in.gains.gamma_f;
    const Eigen::VectorXd& gg = in.gains.gamma_g;
    std::vector<double> quad(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Eigen::VectorXd df = trace.w_f[k] - in.fit_f.w_star;
      const Eigen::VectorXd dg = trace.w_g[k] - in.fit_g.w_star;
      quad[k] = 0.5 * ((df.array().square() / gf.array()).sum() +
                       (dg.array().square() / gg.array()).sum());
      if (in.scheme == Scheme::kC) {
        const double lf = trace.column("lf_hat")[k] - in.lf_true;
        const double lg = trace.column("lg_hat")[k] - in.lg_true;
        quad[k] += 0.5 * (lf * lf / in.gains.gamma_lf + lg * lg / in.gains.gamma_lg);
      }
    }
    CheckRecorder diss(rep, "dissipation", false);
    if (in.scheme == Scheme::kA) {
      for (std::size_t k = 0; k < t.size(); ++k) lyap[k] = v[k] + quad[k];
      for (std::size_t k = 1; k < t.size(); ++k) {
        if (std::abs(et[k - 1]) > kUubSlack * bound && std::abs(et[k]) > kUubSlack * bound) {
          diss.add(t[k], lyap[k], lyap[k - 1] + 0.05 * std::abs(lyap[k - 1]) + 1e-12);
        }
      }
    } else {
      for (std::size_t k = 0; k < t.size(); ++k) {
        lyap[k] = v[k] + window_plain(t, quad, t[k] - tau, t[k]);
      }
      const auto m = static_cast<std::size_t>(std::llround(tau / (t[1] - t[0])));
      for (std::size_t k = m; m > 0 && k < t.size(); ++k) {
        bool outside = true;
        for (std::size_t j = k - m; j <= k && outside; ++j) {
          outside = std::abs(et[j]) > kUubSlack * bound;
        }
        if (outside) {
          diss.add(t[k], lyap[k], lyap[k - m] + 0.05 * std::abs(lyap[k - m]) + 1e-12);
        }
      }
    }
  }
  return rep;
}

std::string report_text(const BoundReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << "scheme " << to_string(r.scheme) << ": " << (r.pass() ? "PASS" : "FAIL") << "\n";
  out << "  steady bound      " << r.b_ef << "\n";
  out << "  epsilon           " << r.eps_total << "\n";
  out << "  varpi0            " << r.varpi0 << "\n";
  out << "  c1, c2            " << r.c1 << ", " << r.c2 << "\n";
  out << "  entry time        " << r.t_detected << " (checked from " << r.t_entry << ")\n";
  for (const auto& c : r.checks) {
    out << "  " << (c.counts ? "" : "[advisory] ") << c.name << ": " << c.evaluated
        << " points, " << c.violations << " violations, min margin " << c.min_margin
        << " at t = " << c.worst_t << "\n";
  }
  const std::size_t shown = std::min<std::size_t>(r.violations.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& v = r.violations[i];
    out << "  violation " << v.check << " at t = " << v.t << ": " << v.lhs << " > " << v.rhs
        << "\n";
  }
  if (r.violations.size() > shown) {
    out << "  ... " << r.violations.size() - shown << " more violations\n";
  }
  return out.str();
}

std::string report_csv(const BoundReport& r) {
  std::string out = "check,t,lhs,rhs,margin\n";
  char buf[160];
  auto row = [&](const std::string& name, double t, double lhs, double rhs) {
    const double margin = lhs > 0.0 ? rhs / lhs : kInf;
    std::snprintf(buf, sizeof buf, ",%.12e,%.12e,%.12e,%.12e\n", t, lhs, rhs, margin);
    out += name;
    out += buf;
  };
  for (const auto& c : r.checks) {
    if (c.evaluated > 0) row(c.name, c.worst_t, c.worst_lhs, c.worst_rhs);
  }
  for (const auto& v : r.violations) row(v.check, v.t, v.lhs, v.rhs);
  return out;
}

// ------------------------------------------------- approximation comparison

ApproximationComparison approximation_comparison(const TargetFunction& target,
                                                 const DesiredTrajectory& traj,
                                                 int per_axis, double grid_step,
                                                 const std::vector<double>& radii,
                                                 int samples_per_axis, double ridge) {
  if (samples_per_axis < 2) throw PreconditionError("need >= 2 samples per axis");
  const int n = traj.order();
  ApproximationComparison out;
  out.radii = radii;
  for (double radius : radii) {
    if (!(radius > 0.0)) throw PreconditionError("box radius must be > 0");
    // Conventional: centers and samples over the state box.
    const std::vector<double> lo(static_cast<std::size_t>(n), -radius);
    const std::vector<double> hi(static_cast<std::size_t>(n), radius);
    CenterGrid grid = place_centers_grid(lo, hi, per_axis);
    const RbfNetwork conv(std::move(grid.centers), std::move(grid.widths));
    Eigen::Index count = 1;
    for (int i = 0; i < n; ++i) count *= samples_per_axis;
    Eigen::MatrixXd samples(count, n);
    for (Eigen::Index row = 0; row < count; ++row) {
      Eigen::Index rest = row;
      for (int axis = n - 1; axis >= 0; --axis) {
        const auto j = static_cast<double>(rest % samples_per_axis);
        rest /= samples_per_axis;
        samples(row, axis) = -radius + 2.0 * radius * j / (samples_per_axis - 1);
      }
    }
    out.conventional_residual.push_back(fit_least_squares(target, samples, conv, ridge).eps_bar);
    out.nodes = conv.size();

    // Desired approximation: only Omega_d matters, the box is never read.
    CenterGrid da_grid = place_centers_grid(traj.omega_d_box(), n, per_axis);
    const RbfNetwork da(std::move(da_grid.centers), std::move(da_grid.widths));
    out.da_eps_bar.push_back(fit_ideal_weights(target, traj, da, grid_step, ridge).eps_bar);
  }
  return out;
}

}  // namespace danc
