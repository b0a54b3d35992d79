#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>

namespace danc {

using StateFunction = std::function<double(const Eigen::VectorXd&)>;
using PairFunction =
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// SISO plant in controllable canonical form, g(x) x_n' = f(x) + u.
///
/// lf_bound / lg_bound are the known bounding functions on |f(x) - f(x_d)|
/// and |g(x) - g(x_d)|. hbar_f / hbar_g are the known factors of the
/// Lipschitz-type form, with lf_true / lg_true the constants that go with
/// them. The constants are kept for verification only; controllers never read
/// them.
struct PlantModel {
  std::string name;
  int n = 0;
  StateFunction f;
  StateFunction g;
  PairFunction lf_bound;
  PairFunction lg_bound;
  PairFunction hbar_f;
  PairFunction hbar_g;
  double lf_true = 0.0;
  double lg_true = 0.0;
};

/// Named scalar overrides for the builtin plants' coefficients.
using PlantOverrides = std::map<std::string, double>;

/// x_i' = x_{i+1}, x_n' = (f(x) + u) / g(x). Throws GainSignError if
/// g(x) <= 0.
Eigen::VectorXd plant_derivative(const PlantModel& model,
                                 const Eigen::VectorXd& x, double u);

/// Benchmark plants P1, P2, P3.
///
///  P1 (n=2): f = a sin(x1) + b tanh(x2),  g = c + d cos(x1)
///            defaults a=0.5 b=0.3 c=2 d=1
///  P2 (n=3): f = a sin(x1) + b tanh(x2) + e tanh(x3),
///            g = c + d cos(x1) + k sin(x2)
///            defaults a=0.4 b=0.2 e=0.1 c=2 d=0.5 k=0.3
///  P3 (n=2): f as P1,  g = c + d sin(x1 x2),  defaults c=1.5 d=0.4
///
/// Throws ConfigError for an unknown tag, an unknown override key, or
/// coefficients that allow g(x) <= 0.
PlantModel builtin_plant(const std::string& name,
                         const PlantOverrides& overrides = {});

/// Coefficient names accepted by builtin_plant(name, overrides).
std::map<std::string, double> builtin_plant_defaults(const std::string& name);

}  // namespace danc
