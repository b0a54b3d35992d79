#include "danc/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "danc/error.hpp"

namespace danc::toml {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

double parse_number(const std::string& text, int line_no) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    fail(line_no, "expected a number, got '" + text + "'");
  }
  return v;
}

Value parse_value(const std::string& raw, int line_no) {
  const std::string text = trim(raw);
  if (text.empty()) fail(line_no, "missing value");
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') fail(line_no, "unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text.front() == '[') {
    if (text.back() != ']') fail(line_no, "unterminated array");
    std::vector<double> items;
    const std::string body = trim(text.substr(1, text.size() - 2));
    if (body.empty()) return items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;  // trailing comma
      items.push_back(parse_number(t, line_no));
    }
    return items;
  }
  return parse_number(text, line_no);
}

}  // namespace

Document parse(const std::string& text) {
  Document doc;
  Table* current = &doc.root;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail(line_no, "malformed table header");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (!valid_key(name)) fail(line_no, "invalid table name '" + name + "'");
      if (doc.tables.count(name)) fail(line_no, "duplicate table [" + name + "]");
      current = &doc.tables[name];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (!valid_key(key)) fail(line_no, "invalid key '" + key + "'");
    if (current->count(key)) fail(line_no, "duplicate key '" + key + "'");
    (*current)[key] = parse_value(body.substr(eq + 1), line_no);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string format_value(const Value& value) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // Keep integral values recognisable as floats.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  };
  if (const auto* d = std::get_if<double>(&value)) return num(*d);
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&value)) return "\"" + *s + "\"";
  const auto& arr = std::get<std::vector<double>>(value);
  std::string out = "[";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (i) out += ", ";
    out += num(arr[i]);
  }
  return out + "]";
}

}  // namespace danc::toml
