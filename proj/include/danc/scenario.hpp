#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "danc/controllers.hpp"
#include "danc/plant.hpp"
#include "danc/trajectory.hpp"

namespace danc {

/// Everything needed to reproduce one closed-loop run and its verification.
/// Defaults are the nominal P1 benchmark.
struct Scenario {
  // [plant]
  std::string plant = "P1";
  PlantOverrides plant_overrides;
  std::vector<double> x0 = {0.5, 0.0};

  // [reference]
  ReferenceSpec reference = {ReferenceFamily::kSinusoid, {{1.0, 0.5, 0.0}}, 0.0, {}, 0.0};

  // [filter]
  std::vector<double> lambda = {2.0};

  // [controller]
  Scheme scheme = Scheme::kB;
  double kappa = 4.0;
  double eps_rho = 0.01;
  double eta = 0.5;
  double eta_f = 0.5;
  double eta_g = 0.5;
  std::vector<double> gamma_f = {5.0};  // one entry means c * I
  std::vector<double> gamma_g = {5.0};
  double sigma_f = 0.01;
  double sigma_g = 0.01;
  double gamma_lf = 1.0;
  double gamma_lg = 1.0;
  double sigma_lf = 0.01;
  double sigma_lg = 0.01;
  double tau = 0.01;

  // [network]
  int per_axis = 7;
  double fit_grid_step = 0.01;
  double ridge = 1e-10;
  bool precompute_basis = false;

  // [sim]
  double h = 1e-3;
  double horizon = 10.0;
  double delta = 1.0;

  // [output]
  std::string out_dir = "out";
  std::string trace_file = "trace.csv";
  bool verbose_trace = false;

  // [verify]
  double kappa_report_scale = 1.0;  // != 1 only in falsification fixtures
  double tail_fraction = 0.2;

  std::uint64_t seed = 1;

  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& scenario);

/// Number of integrator steps tau / h (throws ConfigError unless integral).
std::size_t delay_steps(const Scenario& scenario);
/// Number of integrator steps horizon / h (throws ConfigError unless integral).
std::size_t horizon_steps(const Scenario& scenario);

/// Whole-scenario checks: Hurwitz filter, positive gains, tau = m h,
/// 0 < delta < horizon, dimensions, g(x0) > 0. Throws ConfigError.
void validate_scenario(const Scenario& scenario);

/// Scalars a sweep may vary.
const std::vector<std::string>& sweep_axes();

/// Copy of the scenario with one named scalar replaced. Throws ConfigError
/// for an unknown axis.
Scenario with_axis_value(const Scenario& scenario, const std::string& axis,
                         double value);

}  // namespace danc
