#include "danc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "danc/error.hpp"
#include "danc/error_geometry.hpp"
#include "danc/toml_lite.hpp"

namespace danc {

namespace {

using toml::Table;
using toml::Value;

// Reads typed keys out of one table and remembers which were consumed, so
// leftovers can be reported as unknown.
class TableReader {
 public:
  TableReader(const Table* table, std::string name)
      : table_(table), name_(std::move(name)) {}

  void number(const char* key, double& out) {
    if (const Value* v = find(key)) {
      const auto* d = std::get_if<double>(v);
      if (!d) fail(key, "a number");
      out = *d;
    }
  }

  void integer(const char* key, int& out) {
    double d = out;
    number(key, d);
    if (d != std::floor(d) || std::abs(d) > 1e9) fail(key, "an integer");
    out = static_cast<int>(d);
  }

  void boolean(const char* key, bool& out) {
    if (const Value* v = find(key)) {
      const auto* b = std::get_if<bool>(v);
      if (!b) fail(key, "true or false");
      out = *b;
    }
  }

  void string(const char* key, std::string& out) {
    if (const Value* v = find(key)) {
      const auto* s = std::get_if<std::string>(v);
      if (!s) fail(key, "a quoted string");
      out = *s;
    }
  }

  void array(const char* key, std::vector<double>& out) {
    if (const Value* v = find(key)) {
      if (const auto* a = std::get_if<std::vector<double>>(v)) {
        out = *a;
      } else if (const auto* d = std::get_if<double>(v)) {
        out = {*d};
      } else {
        fail(key, "a numeric array");
      }
    }
  }

  bool has(const char* key) const { return table_ && table_->count(key); }

  // Keys not consumed so far.
  std::vector<std::string> leftovers() const {
    std::vector<std::string> out;
    if (!table_) return out;
    for (const auto& [k, v] : *table_) {
      if (!seen_.count(k)) out.push_back(k);
    }
    return out;
  }

  void reject_leftovers() const {
    const auto rest = leftovers();
    if (!rest.empty()) {
      throw ConfigError("unknown key '" + rest.front() + "' in [" + name_ + "]");
    }
  }

  const Table* table() const { return table_; }

 private:
  const Value* find(const char* key) {
    if (!table_) return nullptr;
    const auto it = table_->find(key);
    if (it == table_->end()) return nullptr;
    seen_.insert(key);
    return &it->second;
  }

  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw ConfigError("[" + name_ + "] " + key + " must be " + expected);
  }

  const Table* table_;
  std::string name_;
  std::set<std::string> seen_;
};

const Table* find_table(const toml::Document& doc, const char* name) {
  const auto it = doc.tables.find(name);
  return it == doc.tables.end() ? nullptr : &it->second;
}

void parse_reference(TableReader& r, ReferenceSpec& ref) {
  std::string family = to_string(ref.family);
  r.string("family", family);
  ref.family = reference_family_from_string(family);

  std::vector<double> amps, omegas, phases;
  for (const auto& term : ref.terms) {
    amps.push_back(term.amplitude);
    omegas.push_back(term.omega);
    phases.push_back(term.phase);
  }
  const bool explicit_terms = r.has("amplitudes") || r.has("omegas");
  r.array("amplitudes", amps);
  r.array("omegas", omegas);
  if (explicit_terms && !r.has("phases")) phases.assign(amps.size(), 0.0);
  r.array("phases", phases);
  if (amps.size() != omegas.size() || amps.size() != phases.size()) {
    throw ConfigError("[reference] amplitudes, omegas and phases must have equal length");
  }
  ref.terms.clear();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    ref.terms.push_back({amps[i], omegas[i], phases[i]});
  }
  r.number("offset", ref.offset);
  r.array("coefficients", ref.coefficients);
  r.number("value", ref.value);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const toml::Document doc = toml::parse(text);
  static const std::set<std::string> kTables = {
      "plant", "reference", "filter", "controller", "network", "sim", "output", "verify"};
  for (const auto& [name, table] : doc.tables) {
    if (!kTables.count(name)) throw ConfigError("unknown table [" + name + "]");
  }

  Scenario s;
  {
    TableReader r(&doc.root, "top level");
    double seed = static_cast<double>(s.seed);
    r.number("seed", seed);
    if (seed < 0 || seed != std::floor(seed) || seed > 9007199254740992.0) {
      throw ConfigError("seed must be a non-negative integer");
    }
    s.seed = static_cast<std::uint64_t>(seed);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "plant"), "plant");
    r.string("name", s.plant);
    r.array("x0", s.x0);
    // Any remaining numeric key is a coefficient override; builtin_plant
    // rejects names the plant does not have.
    for (const auto& key : r.leftovers()) {
      const auto* d = std::get_if<double>(&r.table()->at(key));
      if (!d) throw ConfigError("[plant] override '" + key + "' must be a number");
      s.plant_overrides[key] = *d;
    }
  }
  {
    TableReader r(find_table(doc, "reference"), "reference");
    parse_reference(r, s.reference);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "filter"), "filter");
    r.array("lambda", s.lambda);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "controller"), "controller");
    std::string scheme = to_string(s.scheme);
    r.string("scheme", scheme);
    s.scheme = scheme_from_string(scheme);
    r.number("kappa", s.kappa);
    r.number("eps_rho", s.eps_rho);
    r.number("eta", s.eta);
    r.number("eta_f", s.eta_f);
    r.number("eta_g", s.eta_g);
    r.array("gamma_f", s.gamma_f);
    r.array("gamma_g", s.gamma_g);
    r.number("sigma_f", s.sigma_f);
    r.number("sigma_g", s.sigma_g);
    r.number("gamma_lf", s.gamma_lf);
    r.number("gamma_lg", s.gamma_lg);
    r.number("sigma_lf", s.sigma_lf);
    r.number("sigma_lg", s.sigma_lg);
    r.number("tau", s.tau);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "network"), "network");
    r.integer("per_axis", s.per_axis);
    r.number("fit_grid_step", s.fit_grid_step);
    r.number("ridge", s.ridge);
    r.boolean("precompute_basis", s.precompute_basis);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "sim"), "sim");
    r.number("h", s.h);
    r.number("horizon", s.horizon);
    r.number("delta", s.delta);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "output"), "output");
    r.string("out_dir", s.out_dir);
    r.string("trace_file", s.trace_file);
    r.boolean("verbose_trace", s.verbose_trace);
    r.reject_leftovers();
  }
  {
    TableReader r(find_table(doc, "verify"), "verify");
    r.number("kappa_report_scale", s.kappa_report_scale);
    r.number("tail_fraction", s.tail_fraction);
    r.reject_leftovers();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  using toml::format_value;
  std::ostringstream out;
  auto kv = [&](const char* key, const Value& v) {
    out << key << " = " << format_value(v) << "\n";
  };
  kv("seed", static_cast<double>(s.seed));

  out << "\n[plant]\n";
  kv("name", s.plant);
  kv("x0", s.x0);
  for (const auto& [key, value] : s.plant_overrides) kv(key.c_str(), value);

  out << "\n[reference]\n";
  kv("family", to_string(s.reference.family));
  std::vector<double> amps, omegas, phases;
  for (const auto& term : s.reference.terms) {
    amps.push_back(term.amplitude);
    omegas.push_back(term.omega);
    phases.push_back(term.phase);
  }
  kv("amplitudes", amps);
  kv("omegas", omegas);
  kv("phases", phases);
  kv("offset", s.reference.offset);
  kv("coefficients", s.reference.coefficients);
  kv("value", s.reference.value);

  out << "\n[filter]\n";
  kv("lambda", s.lambda);

  out << "\n[controller]\n";
  kv("scheme", to_string(s.scheme));
  kv("kappa", s.kappa);
  kv("eps_rho", s.eps_rho);
  kv("eta", s.eta);
  kv("eta_f", s.eta_f);
  kv("eta_g", s.eta_g);
  kv("gamma_f", s.gamma_f);
  kv("gamma_g", s.gamma_g);
  kv("sigma_f", s.sigma_f);
  kv("sigma_g", s.sigma_g);
  kv("gamma_lf", s.gamma_lf);
  kv("gamma_lg", s.gamma_lg);
  kv("sigma_lf", s.sigma_lf);
  kv("sigma_lg", s.sigma_lg);
  kv("tau", s.tau);

  out << "\n[network]\n";
  kv("per_axis", static_cast<double>(s.per_axis));
  kv("fit_grid_step", s.fit_grid_step);
  kv("ridge", s.ridge);
  kv("precompute_basis", s.precompute_basis);

  out << "\n[sim]\n";
  kv("h", s.h);
  kv("horizon", s.horizon);
  kv("delta", s.delta);

  out << "\n[output]\n";
  kv("out_dir", s.out_dir);
  kv("trace_file", s.trace_file);
  kv("verbose_trace", s.verbose_trace);

  out << "\n[verify]\n";
  kv("kappa_report_scale", s.kappa_report_scale);
  kv("tail_fraction", s.tail_fraction);
  return out.str();
}

namespace {

std::size_t integral_ratio(double num, double den, const char* what) {
  if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
    throw ConfigError(std::string(what) + ": values must be positive and finite");
  }
  const double ratio = num / den;
  const double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, k)) {
    std::ostringstream msg;
    msg << what << ": " << num << " is not an integer multiple of h = " << den;
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(k);
}

}  // namespace

std::size_t delay_steps(const Scenario& s) {
  return integral_ratio(s.tau, s.h, "tau");
}

std::size_t horizon_steps(const Scenario& s) {
  return integral_ratio(s.horizon, s.h, "horizon");
}

void validate_scenario(const Scenario& s) {
  const PlantModel plant = builtin_plant(s.plant, s.plant_overrides);
  const auto n = static_cast<std::size_t>(plant.n);
  if (s.x0.size() != n) {
    throw ConfigError("x0 has " + std::to_string(s.x0.size()) + " entries, plant " +
                      s.plant + " has order " + std::to_string(n));
  }
  if (s.lambda.size() + 1 != n) {
    throw ConfigError("filter lambda needs " + std::to_string(n - 1) +
                      " entries for a plant of order " + std::to_string(n));
  }
  if (!check_hurwitz(s.lambda)) {
    throw ConfigError("filter polynomial " + describe_filter_polynomial(s.lambda) +
                      " is not Hurwitz");
  }
  for (double v : s.x0) {
    if (!std::isfinite(v)) throw ConfigError("x0 must be finite");
  }

  ControllerGains gains;
  gains.kappa = s.kappa;
  gains.eps_rho = s.eps_rho;
  gains.eta = s.eta;
  gains.eta_f = s.eta_f;
  gains.eta_g = s.eta_g;
  gains.sigma_f = s.sigma_f;
  gains.sigma_g = s.sigma_g;
  gains.gamma_lf = s.gamma_lf;
  gains.gamma_lg = s.gamma_lg;
  gains.sigma_lf = s.sigma_lf;
  gains.sigma_lg = s.sigma_lg;
  gains.tau = s.tau;
  gains.gamma_f = Eigen::VectorXd::Ones(1);
  gains.gamma_g = Eigen::VectorXd::Ones(1);
  validate_gains(gains, 1);
  for (const auto* gamma : {&s.gamma_f, &s.gamma_g}) {
    if (gamma->empty()) throw ConfigError("Gamma must have at least one entry");
    for (double v : *gamma) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("Gamma entries must be strictly positive");
      }
    }
  }

  if (!(s.h > 0.0) || !std::isfinite(s.h)) throw ConfigError("h must be > 0");
  horizon_steps(s);
  delay_steps(s);
  if (!(s.delta > 0.0) || !(s.delta < s.horizon)) {
    throw ConfigError("delta must satisfy 0 < delta < horizon");
  }
  if (s.per_axis < 2) throw ConfigError("per_axis must be >= 2");
  if (!(s.fit_grid_step > 0.0)) throw ConfigError("fit_grid_step must be > 0");
  if (!(s.ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
  if (!(s.kappa_report_scale > 0.0)) throw ConfigError("kappa_report_scale must be > 0");
  if (!(s.tail_fraction > 0.0) || s.tail_fraction > 1.0) {
    throw ConfigError("tail_fraction must lie in (0, 1]");
  }
  if (s.trace_file.empty()) throw ConfigError("trace_file must not be empty");

  // Constructs the reference, which checks the family's own fields.
  make_reference(s.reference, plant.n, s.horizon, s.h);

  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(s.x0.data(), plant.n);
  if (!(plant.g(x0) > 0.0)) throw ConfigError("plant gain g(x0) is not positive");
}

namespace {

using AxisSetter = std::function<void(Scenario&, double)>;

const std::vector<std::pair<std::string, AxisSetter>>& axis_table() {
  static const std::vector<std::pair<std::string, AxisSetter>> table = {
      {"kappa", [](Scenario& s, double v) { s.kappa = v; }},
      {"eps_rho", [](Scenario& s, double v) { s.eps_rho = v; }},
      {"eta", [](Scenario& s, double v) { s.eta = v; }},
      {"eta_f", [](Scenario& s, double v) { s.eta_f = v; }},
      {"eta_g", [](Scenario& s, double v) { s.eta_g = v; }},
      {"gamma", [](Scenario& s, double v) { s.gamma_f = {v}; s.gamma_g = {v}; }},
      {"gamma_f", [](Scenario& s, double v) { s.gamma_f = {v}; }},
      {"gamma_g", [](Scenario& s, double v) { s.gamma_g = {v}; }},
      {"sigma", [](Scenario& s, double v) { s.sigma_f = v; s.sigma_g = v; }},
      {"sigma_f", [](Scenario& s, double v) { s.sigma_f = v; }},
      {"sigma_g", [](Scenario& s, double v) { s.sigma_g = v; }},
      {"gamma_lf", [](Scenario& s, double v) { s.gamma_lf = v; }},
      {"gamma_lg", [](Scenario& s, double v) { s.gamma_lg = v; }},
      {"sigma_lf", [](Scenario& s, double v) { s.sigma_lf = v; }},
      {"sigma_lg", [](Scenario& s, double v) { s.sigma_lg = v; }},
      {"tau", [](Scenario& s, double v) { s.tau = v; }},
      {"per_axis",
       [](Scenario& s, double v) {
         if (v != std::floor(v)) throw ConfigError("per_axis must be an integer");
         s.per_axis = static_cast<int>(v);
       }},
      {"h", [](Scenario& s, double v) { s.h = v; }},
      {"horizon", [](Scenario& s, double v) { s.horizon = v; }},
      {"delta", [](Scenario& s, double v) { s.delta = v; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, setter] : axis_table()) out.push_back(name);
    return out;
  }();
  return names;
}

Scenario with_axis_value(const Scenario& scenario, const std::string& axis,
                         double value) {
  for (const auto& [name, setter] : axis_table()) {
    if (name == axis) {
      Scenario copy = scenario;
      setter(copy, value);
      return copy;
    }
  }
  throw ConfigError("unknown sweep axis '" + axis + "'");
}

}  // namespace danc
