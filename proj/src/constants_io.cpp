#include "hypdim/constants_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace hypdim {

namespace {

std::string num_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    return {};
  }
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw DomainError("constants: bad number for " + key + ": " + value);
  }
  if (used != value.size()) {
    throw DomainError("constants: bad number for " + key + ": " + value);
  }
  return x;
}

#include "bundled_constants.inc"

} // namespace

std::string format_constants(const CalibratedConstants& c) {
  std::ostringstream os;
  os << "p = " << num_text(c.p) << "\n";
  os << "C = " << num_text(c.C) << "\n";
  os << "D = " << num_text(c.D) << "\n";
  os << "r0 = " << num_text(c.r0) << "\n";
  os << "K = " << num_text(c.K) << "\n";
  os << "Kcal = " << num_text(c.Kcal) << "\n";
  os << "grid = " << c.grid_description << "\n";
  for (const auto& [k, v] : c.diagnostics) {
    os << "diag." << k << " = " << num_text(v) << "\n";
  }
  return os.str();
}

CalibratedConstants parse_constants(const std::string& text) {
  std::map<std::string, std::string> kv;
  CalibratedConstants c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DomainError("constants: line " + std::to_string(lineno) + " has no '='");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("diag.", 0) == 0) {
      c.diagnostics.emplace_back(key.substr(5), to_double(key, value));
    } else {
      kv[key] = value;
    }
  }
  for (const char* required : {"p", "C", "D", "r0", "K", "Kcal"}) {
    if (!kv.count(required)) {
      throw DomainError(std::string("constants: missing key ") + required);
    }
  }
  c.p = to_double("p", kv["p"]);
  c.C = to_double("C", kv["C"]);
  c.D = to_double("D", kv["D"]);
  c.r0 = to_double("r0", kv["r0"]);
  c.K = to_double("K", kv["K"]);
  c.Kcal = to_double("Kcal", kv["Kcal"]);
  c.grid_description = kv.count("grid") ? kv["grid"] : "";
  c.validate();
  return c;
}

CalibratedConstants load_constants(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot read constants file " + path);
  }
  std::ostringstream os;
  os << is.rdbuf();
  return parse_constants(os.str());
}

void save_constants(const std::string& path, const CalibratedConstants& c) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write constants file " + path);
  }
  os << format_constants(c);
}

std::optional<CalibratedConstants> bundled_constants(double p) {
  for (const auto& [bp, text] : kBundled) {
    if (std::abs(bp - p) < 1e-12) {
      return parse_constants(text);
    }
  }
  return std::nullopt;
}

} // namespace hypdim
