#include "danc/plant.hpp"

#include <cmath>
#include <sstream>

#include "danc/error.hpp"

namespace danc {

Eigen::VectorXd plant_derivative(const PlantModel& model,
                                 const Eigen::VectorXd& x, double u) {
  require_same_size(static_cast<std::size_t>(x.size()),
                    static_cast<std::size_t>(model.n), "plant state");
  const double gain = model.g(x);
  if (!(gain > 0.0)) {
    std::ostringstream msg;
    msg << "gain-sign violation: g(x) = " << gain << " <= 0 for plant "
        << model.name;
    throw GainSignError(msg.str(), 0.0);
  }
  Eigen::VectorXd dx(model.n);
  for (int i = 0; i + 1 < model.n; ++i) dx[i] = x[i + 1];
  dx[model.n - 1] = (model.f(x) + u) / gain;
  return dx;
}

namespace {

using Params = std::map<std::string, double>;

Params merge(Params defaults, const PlantOverrides& overrides,
             const std::string& name) {
  for (const auto& [key, value] : overrides) {
    auto it = defaults.find(key);
    if (it == defaults.end()) {
      throw ConfigError("plant " + name + " has no coefficient '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw ConfigError("plant coefficient '" + key + "' is not finite");
    }
    it->second = value;
  }
  return defaults;
}

PairFunction scaled_distance(double constant, PairFunction factor) {
  return [constant, factor](const Eigen::VectorXd& x, const Eigen::VectorXd& xd) {
    return constant * (x - xd).norm() * factor(x, xd);
  };
}

PairFunction unit_factor() {
  return [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 1.0; };
}

PlantModel make_p1(const Params& p) {
  const double a = p.at("a"), b = p.at("b"), c = p.at("c"), d = p.at("d");
  if (!(c - std::abs(d) > 0.0)) {
    throw ConfigError("P1 coefficients allow g(x) <= 0 (need c > |d|)");
  }
  PlantModel m;
  m.name = "P1";
  m.n = 2;
  m.f = [a, b](const Eigen::VectorXd& x) {
    return a * std::sin(x[0]) + b * std::tanh(x[1]);
  };
  m.g = [c, d](const Eigen::VectorXd& x) { return c + d * std::cos(x[0]); };
  m.lf_true = std::abs(a) + std::abs(b);
  m.lg_true = std::abs(d);
  m.hbar_f = unit_factor();
  m.hbar_g = unit_factor();
  m.lf_bound = scaled_distance(m.lf_true, m.hbar_f);
  m.lg_bound = scaled_distance(m.lg_true, m.hbar_g);
  return m;
}

PlantModel make_p2(const Params& p) {
  const double a = p.at("a"), b = p.at("b"), e = p.at("e");
  const double c = p.at("c"), d = p.at("d"), k = p.at("k");
  if (!(c - std::abs(d) - std::abs(k) > 0.0)) {
    throw ConfigError("P2 coefficients allow g(x) <= 0 (need c > |d| + |k|)");
  }
  PlantModel m;
  m.name = "P2";
  m.n = 3;
  m.f = [a, b, e](const Eigen::VectorXd& x) {
    return a * std::sin(x[0]) + b * std::tanh(x[1]) + e * std::tanh(x[2]);
  };
  m.g = [c, d, k](const Eigen::VectorXd& x) {
    return c + d * std::cos(x[0]) + k * std::sin(x[1]);
  };
  m.lf_true = std::abs(a) + std::abs(b) + std::abs(e);
  m.lg_true = std::abs(d) + std::abs(k);
  m.hbar_f = unit_factor();
  m.hbar_g = unit_factor();
  m.lf_bound = scaled_distance(m.lf_true, m.hbar_f);
  m.lg_bound = scaled_distance(m.lg_true, m.hbar_g);
  return m;
}

PlantModel make_p3(const Params& p) {
  const double a = p.at("a"), b = p.at("b"), c = p.at("c"), d = p.at("d");
  if (!(c - std::abs(d) > 0.0)) {
    throw ConfigError("P3 coefficients allow g(x) <= 0 (need c > |d|)");
  }
  PlantModel m;
  m.name = "P3";
  m.n = 2;
  m.f = [a, b](const Eigen::VectorXd& x) {
    return a * std::sin(x[0]) + b * std::tanh(x[1]);
  };
  m.g = [c, d](const Eigen::VectorXd& x) {
    return c + d * std::sin(x[0] * x[1]);
  };
  m.lf_true = std::abs(a) + std::abs(b);
  m.lg_true = std::abs(d);
  m.hbar_f = unit_factor();
  // |x1 x2 - y1 y2| <= (|x1| + |y2|) |x - y| <= (|x| + |y|) |x - y|
  m.hbar_g = [](const Eigen::VectorXd& x, const Eigen::VectorXd& xd) {
    return x.norm() + xd.norm();
  };
  m.lf_bound = scaled_distance(m.lf_true, m.hbar_f);
  const double lg = m.lg_true;
  m.lg_bound = [lg](const Eigen::VectorXd& x, const Eigen::VectorXd& xd) {
    return std::min(2.0 * lg, lg * (x - xd).norm() * (x.norm() + xd.norm()));
  };
  return m;
}

}  // namespace

std::map<std::string, double> builtin_plant_defaults(const std::string& name) {
  if (name == "P1") return {{"a", 0.5}, {"b", 0.3}, {"c", 2.0}, {"d", 1.0}};
  if (name == "P2") {
    return {{"a", 0.4}, {"b", 0.2}, {"e", 0.1},
            {"c", 2.0}, {"d", 0.5}, {"k", 0.3}};
  }
  if (name == "P3") return {{"a", 0.5}, {"b", 0.3}, {"c", 1.5}, {"d", 0.4}};
  throw ConfigError("unknown plant '" + name + "' (expected P1, P2 or P3)");
}

PlantModel builtin_plant(const std::string& name,
                         const PlantOverrides& overrides) {
  const Params params = merge(builtin_plant_defaults(name), overrides, name);
  if (name == "P1") return make_p1(params);
  if (name == "P2") return make_p2(params);
  return make_p3(params);
}

}  // namespace danc
