#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace danc::toml {

// The subset of TOML the scenario files use: [table] headers, key = value
// pairs, numbers, booleans, double-quoted strings, single-line numeric
// arrays, and # comments.
using Value = std::variant<double, bool, std::string, std::vector<double>>;
using Table = std::map<std::string, Value>;

struct Document {
  Table root;
  std::map<std::string, Table> tables;
};

/// Throws ConfigError with the offending line number.
Document parse(const std::string& text);
Document parse_file(const std::string& path);

std::string format_value(const Value& value);

}  // namespace danc::toml
