#include "danc/sim_engine.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "danc/error_geometry.hpp"

namespace danc {

SimTrace::SimTrace(std::vector<std::string> names)
    : names_(std::move(names)), columns_(names_.size()) {}

bool SimTrace::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& SimTrace::column(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    std::string avail;
    for (const auto& n : names_) avail += (avail.empty() ? "" : ", ") + n;
    throw TraceFormatError("trace has no column '" + name + "' (available: " + avail + ")");
  }
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

void SimTrace::append_row(const std::vector<double>& values) {
  require_same_size(values.size(), names_.size(), "trace row");
  for (std::size_t i = 0; i < values.size(); ++i) columns_[i].push_back(values[i]);
}

namespace {

Eigen::VectorXd expand_gamma(const std::vector<double>& gamma, Eigen::Index n_nodes,
                             const char* name) {
  if (gamma.size() == 1) return Eigen::VectorXd::Constant(n_nodes, gamma.front());
  if (static_cast<Eigen::Index>(gamma.size()) != n_nodes) {
    throw ConfigError(std::string(name) + " has " + std::to_string(gamma.size()) +
                      " entries; expected 1 or N = " + std::to_string(n_nodes));
  }
  return Eigen::Map<const Eigen::VectorXd>(gamma.data(), n_nodes);
}

RbfNetwork make_network(const DesiredTrajectory& traj, int per_axis) {
  CenterGrid grid = place_centers_grid(traj.omega_d_box(), traj.order(), per_axis);
  return RbfNetwork(std::move(grid.centers), std::move(grid.widths));
}

}  // namespace

ClosedLoopSetup build_setup(const Scenario& scenario) {
  validate_scenario(scenario);
  PlantModel plant = builtin_plant(scenario.plant, scenario.plant_overrides);
  DesiredTrajectory traj =
      make_reference(scenario.reference, plant.n, scenario.horizon, scenario.h);
  RbfNetwork net = make_network(traj, scenario.per_axis);

  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(scenario.x0.data(), plant.n);
  ErrorTrajectoryPlan plan;
  plan.e_f0 = filtered_error(x0 - traj.desired_state(0.0), scenario.lambda);
  plan.delta = scenario.delta;

  ControllerGains gains;
  gains.kappa = scenario.kappa;
  gains.eps_rho = scenario.eps_rho;
  gains.eta = scenario.eta;
  gains.eta_f = scenario.eta_f;
  gains.eta_g = scenario.eta_g;
  gains.gamma_f = expand_gamma(scenario.gamma_f, net.size(), "gamma_f");
  gains.gamma_g = expand_gamma(scenario.gamma_g, net.size(), "gamma_g");
  gains.sigma_f = scenario.sigma_f;
  gains.sigma_g = scenario.sigma_g;
  gains.gamma_lf = scenario.gamma_lf;
  gains.gamma_lg = scenario.gamma_lg;
  gains.sigma_lf = scenario.sigma_lf;
  gains.sigma_lg = scenario.sigma_lg;
  gains.tau = scenario.tau;
  validate_gains(gains, net.size());

  const std::size_t steps = horizon_steps(scenario);
  std::optional<BasisTable> table;
  if (scenario.precompute_basis) table.emplace(net, traj, scenario.h, steps);

  return ClosedLoopSetup{scenario,       std::move(plant), std::move(traj),
                         plan,           std::move(net),   std::move(gains),
                         std::move(table), steps,          delay_steps(scenario)};
}

Observation observe(const ClosedLoopSetup& setup, double t, const Eigen::VectorXd& x) {
  // RK4 stage times (k h + h/2, k h + h) can miss j h/2 by an ulp; snap them
  // so the cached and direct basis paths see the same instant.
  const double half = 0.5 * setup.scenario.h;
  const double j = std::round(t / half);
  if (std::abs(t / half - j) <= 1e-9) t = j * half;
  Observation o;
  o.x_d = setup.traj.desired_state(t);
  o.e = x - o.x_d;
  o.ef = filtered_error(o.e, setup.scenario.lambda);
  const FilteredErrorTarget target = desired_filtered_error(setup.plan, t);
  o.ef_star = target.value;
  o.def_star = target.rate;
  o.et = o.ef - o.ef_star;
  o.nu = aux_nu(o.e, setup.scenario.lambda, setup.traj.top_derivative(t), o.def_star);
  o.e_norm = o.e.norm();
  o.lf_b = setup.plant.lf_bound(x, o.x_d);
  o.lg_b = setup.plant.lg_bound(x, o.x_d);
  o.hbar_f = setup.plant.hbar_f(x, o.x_d);
  o.hbar_g = setup.plant.hbar_g(x, o.x_d);
  const Eigen::VectorXd* cached =
      setup.basis_table ? setup.basis_table->lookup(t) : nullptr;
  o.s = cached ? *cached : eval_basis(setup.net, DesiredState{o.x_d});
  return o;
}

namespace {

std::vector<std::string> trace_columns(int n) {
  std::vector<std::string> names = {"t"};
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n; ++i) names.push_back("e" + std::to_string(i));
  for (const char* c : {"ef", "ef_star", "et", "nu", "u", "g", "wf_norm", "wg_norm",
                        "lf_hat", "lg_hat", "rho", "smooth", "inc_residual"}) {
    names.push_back(c);
  }
  return names;
}

// Columns written to CSV only in verbose mode.
const std::set<std::string>& verbose_only() {
  static const std::set<std::string> names = {"rho", "smooth", "inc_residual"};
  return names;
}

Eigen::VectorXd plant_rate(const ClosedLoopSetup& setup, const Eigen::VectorXd& x,
                           double u, double t) {
  try {
    return plant_derivative(setup.plant, x, u);
  } catch (const GainSignError& err) {
    throw GainSignError(std::string(err.what()) + " at t = " + std::to_string(t), t);
  }
}

class Recorder {
 public:
  Recorder(const ClosedLoopSetup& setup, SimResult& result)
      : setup_(setup), result_(result), n_(setup.plant.n) {
    result_.trace = SimTrace(trace_columns(n_));
    row_.resize(result_.trace.names().size());
  }

  void record(double t, const Eigen::VectorXd& x, const Observation& o,
              const ControlOutput& c, const Eigen::VectorXd& wf,
              const Eigen::VectorXd& wg, double lf, double lg, double residual) {
    std::size_t j = 0;
    row_[j++] = t;
    for (int i = 0; i < n_; ++i) row_[j++] = x[i];
    for (int i = 0; i < n_; ++i) row_[j++] = o.e[i];
    row_[j++] = o.ef;
    row_[j++] = o.ef_star;
    row_[j++] = o.et;
    row_[j++] = o.nu;
    row_[j++] = c.u;
    row_[j++] = setup_.plant.g(x);
    row_[j++] = wf.norm();
    row_[j++] = wg.norm();
    row_[j++] = lf;
    row_[j++] = lg;
    row_[j++] = c.gain;
    row_[j++] = c.smooth;
    row_[j++] = residual;
    result_.trace.append_row(row_);
    result_.trace.w_f.push_back(wf);
    result_.trace.w_g.push_back(wg);

    // The basis must be the one at x_d(t), whatever path produced it.
    const Eigen::VectorXd fresh =
        eval_basis(setup_.net, DesiredState{setup_.traj.desired_state(t)});
    result_.max_basis_audit_error =
        std::max(result_.max_basis_audit_error, (o.s - fresh).cwiseAbs().maxCoeff());
    result_.max_incremental_residual = std::max(result_.max_incremental_residual, residual);
  }

 private:
  const ClosedLoopSetup& setup_;
  SimResult& result_;
  int n_;
  std::vector<double> row_;
};

void check_magnitude(const Eigen::VectorXd& z, std::size_t step) {
  if (!z.allFinite() || z.cwiseAbs().maxCoeff() > kBlowupThreshold) {
    throw NumericBlowupError(
        "state left the finite range (|z| > 1e9) at step " + std::to_string(step), step);
  }
}

void run_integral(const ClosedLoopSetup& setup, Recorder& rec) {
  const int n = setup.plant.n;
  const Eigen::Index nodes = setup.net.size();
  const ControllerGains& gains = setup.gains;
  const double h = setup.scenario.h;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n + 2 * nodes);
  z.head(n) = Eigen::Map<const Eigen::VectorXd>(setup.scenario.x0.data(), n);

  auto control = [&](double t, const Eigen::VectorXd& state, Observation& o) {
    o = observe(setup, t, state.head(n));
    const double rho = robust_gain_rho(o.lf_b, o.lg_b, o.nu, o.et, gains.eta);
    return control_u_da(o.et, rho, o.nu, o.s, o.s, state.segment(n, nodes),
                        state.tail(nodes), gains);
  };
  auto deriv = [&](double t, const Eigen::VectorXd& state) {
    Observation o;
    const ControlOutput c = control(t, state, o);
    Eigen::VectorXd dz(state.size());
    dz.head(n) = plant_rate(setup, state.head(n), c.u, t);
    dz.segment(n, nodes) = integral_adaptation_rhs(state.segment(n, nodes), o.s, o.et,
                                                   1.0, gains.gamma_f, gains.sigma_f);
    dz.tail(nodes) = integral_adaptation_rhs(state.tail(nodes), o.s, o.et, o.nu,
                                             gains.gamma_g, gains.sigma_g);
    return dz;
  };

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    Observation o;
    const ControlOutput c = control(t, z, o);
    rec.record(t, z.head(n), o, c, z.segment(n, nodes), z.tail(nodes), 0.0, 0.0, 0.0);
    if (k == setup.steps) break;
    z = rk4_step(deriv, z, t, h, k);
    check_magnitude(z, k + 1);
  }
}

void run_incremental(const ClosedLoopSetup& setup, Recorder& rec) {
  const int n = setup.plant.n;
  const ControllerGains& gains = setup.gains;
  const double h = setup.scenario.h;
  const bool scheme_c = setup.scenario.scheme == Scheme::kC;

  ControllerState state(setup.net.size(), setup.delay);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(setup.scenario.x0.data(), n);

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    const Observation o = observe(setup, t, x);
    double residual = incremental_adaptation_step(state, o.s, o.s, o.et, o.nu, gains).residual;
    ControlOutput c;
    if (scheme_c) {
      const LipschitzStep ls = lipschitz_gain_step(state, o.et, o.e_norm, o.nu,
                                                   o.hbar_f, o.hbar_g, gains);
      residual = std::max(residual, ls.residual);
      c = control_u_da2(o.et, o.nu, o.s, o.s, o.e_norm, o.hbar_f, o.hbar_g, state, gains);
    } else {
      const double rho = robust_gain_rho(o.lf_b, o.lg_b, o.nu, o.et, gains.eta);
      c = control_u_da(o.et, rho, o.nu, o.s, o.s, state, gains);
    }
    if (!std::isfinite(c.u)) {
      throw NumericBlowupError("non-finite control at step " + std::to_string(k), k);
    }
    rec.record(t, x, o, c, state.w_f, state.w_g, state.l_f_hat, state.l_g_hat, residual);
    if (k == setup.steps) break;
    const double u = c.u;  // zero-order hold over the step
    auto deriv = [&](double s, const Eigen::VectorXd& xs) {
      return plant_rate(setup, xs, u, s);
    };
    x = rk4_step(deriv, x, t, h, k);
    check_magnitude(x, k + 1);
  }
}

}  // namespace

SimResult run_closed_loop(const ClosedLoopSetup& setup) {
  SimResult result;
  Recorder rec(setup, result);
  try {
    if (setup.scenario.scheme == Scheme::kA) {
      run_integral(setup, rec);
    } else {
      run_incremental(setup, rec);
    }
  } catch (const NumericBlowupError& err) {
    result.status = RunStatus::kNumericBlowup;
    result.diagnostic = err.what();
    result.abort_step = err.step();
  } catch (const GainSignError& err) {
    result.status = RunStatus::kGainSign;
    result.diagnostic = err.what();
    result.abort_step = result.trace.rows();
  }
  return result;
}

SimResult run_closed_loop(const Scenario& scenario) {
  return run_closed_loop(build_setup(scenario));
}

std::string trace_csv(const SimTrace& trace, bool verbose) {
  std::vector<std::size_t> cols;
  std::string out;
  for (std::size_t i = 0; i < trace.names().size(); ++i) {
    if (!verbose && verbose_only().count(trace.names()[i])) continue;
    cols.push_back(i);
    if (!out.empty()) out += ',';
    out += trace.names()[i];
  }
  const bool weights = verbose && trace.w_f.size() == trace.rows() && trace.rows() > 0;
  const Eigen::Index nodes = weights ? trace.w_f.front().size() : 0;
  for (Eigen::Index i = 1; i <= nodes; ++i) out += ",wf_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= nodes; ++i) out += ",wg_" + std::to_string(i);
  out += '\n';

  std::vector<const std::vector<double>*> data;
  for (std::size_t i : cols) data.push_back(&trace.column(trace.names()[i]));
  char buf[32];
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    for (std::size_t c = 0; c < data.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.12e", (*data[c])[r]);
      if (c) out += ',';
      out += buf;
    }
    for (const auto* w : {&trace.w_f, &trace.w_g}) {
      for (Eigen::Index i = 0; i < nodes; ++i) {
        std::snprintf(buf, sizeof buf, ",%.12e", (*w)[r][i]);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

void write_trace_csv(const SimTrace& trace, const std::string& path, bool verbose) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace file '" + path + "'");
  out << trace_csv(trace, verbose);
  if (!out) throw Error("failed writing trace file '" + path + "'");
}

SimTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot read trace file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw TraceFormatError("trace file '" + path + "' has no header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) names.push_back(name);
  }
  SimTrace trace(names);
  std::vector<double> row(names.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= row.size()) break;
      char* end = nullptr;
      row[c] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw TraceFormatError("trace line " + std::to_string(line_no) +
                               ": bad number '" + cell + "'");
      }
      ++c;
    }
    if (c != row.size() || ss.rdbuf()->in_avail() > 0) {
      throw TraceFormatError("trace line " + std::to_string(line_no) + " has " +
                             std::to_string(c) + " fields, header has " +
                             std::to_string(names.size()));
    }
    trace.append_row(row);
  }
  return trace;
}

}  // namespace danc
