#pragma once

// Experiment configuration and its canonical text form: one `key = value` per
// line, keys sorted, '#' starts a comment.

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rrg {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment = "custom";
  int d = 2;
  std::uint64_t n = 0;  // graph size; 0 means use T
  double T = 8.0;
  double T0 = 1.0;
  double S0 = 1.0;
  int K = 3;
  int L = 0;  // truncation level; 0 means K + 8
  std::uint64_t nt = 3;
  std::uint64_t ns = 3;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  double tolerance = 3.0;
  double floor = 0.0;

  int truncation() const { return L > 0 ? L : K + 8; }

  void validate() const {
    if (experiment.empty()) throw ConfigError("experiment name is empty");
    if (d < 1 || d > 127) throw ConfigError("d must be in 1..127");
    if (K < 1) throw ConfigError("K must be >= 1");
    if (L != 0 && L < K) throw ConfigError("L must be >= K");
    if (T < 0 || T0 < 0 || S0 < 0) throw ConfigError("T, T0, S0 must be >= 0");
    if (nt < 1 || ns < 1) throw ConfigError("grid must be at least 1x1");
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (tolerance <= 0 || floor < 0) throw ConfigError("tolerance must be > 0 and floor >= 0");
  }

  std::map<std::string, std::string> to_map() const {
    auto num = [](double v) {
      std::ostringstream os;
      os.precision(17);
      os << v;
      return os.str();
    };
    return {{"experiment", experiment},
            {"d", std::to_string(d)},
            {"n", std::to_string(n)},
            {"T", num(T)},
            {"T0", num(T0)},
            {"S0", num(S0)},
            {"K", std::to_string(K)},
            {"L", std::to_string(L)},
            {"grid", std::to_string(nt) + "x" + std::to_string(ns)},
            {"replicas", std::to_string(replicas)},
            {"seed", std::to_string(seed)},
            {"tolerance", num(tolerance)},
            {"floor", num(floor)}};
  }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
    return out;
  }

  /// Sets one key from text; unknown keys and malformed values throw ConfigError.
  void set(const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      auto whole = [&](std::size_t n) {
        if (n != value.size()) throw ConfigError("trailing characters in value for " + key);
      };
      if (key == "experiment") {
        experiment = value;
      } else if (key == "d") {
        d = std::stoi(value, &used), whole(used);
      } else if (key == "n") {
        n = std::stoull(value, &used), whole(used);
      } else if (key == "T") {
        T = std::stod(value, &used), whole(used);
      } else if (key == "T0") {
        T0 = std::stod(value, &used), whole(used);
      } else if (key == "S0") {
        S0 = std::stod(value, &used), whole(used);
      } else if (key == "K") {
        K = std::stoi(value, &used), whole(used);
      } else if (key == "L") {
        L = std::stoi(value, &used), whole(used);
      } else if (key == "grid") {
        set_grid(value);
      } else if (key == "replicas") {
        replicas = std::stoull(value, &used), whole(used);
      } else if (key == "seed") {
        seed = std::stoull(value, &used), whole(used);
      } else if (key == "tolerance") {
        tolerance = std::stod(value, &used), whole(used);
      } else if (key == "floor") {
        floor = std::stod(value, &used), whole(used);
      } else {
        throw ConfigError("unknown key: " + key);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad value for " + key + ": " + value);
    }
  }

  /// "NTxNS", e.g. "3x3".
  void set_grid(const std::string& value) {
    const auto x = value.find('x');
    if (x == std::string::npos) throw ConfigError("grid must look like NTxNS");
    std::size_t u1 = 0, u2 = 0;
    const std::string a = value.substr(0, x), b = value.substr(x + 1);
    try {
      nt = std::stoull(a, &u1);
      ns = std::stoull(b, &u2);
    } catch (const std::exception&) {
      throw ConfigError("grid must look like NTxNS");
    }
    if (u1 != a.size() || u2 != b.size()) throw ConfigError("grid must look like NTxNS");
  }

  static ExperimentConfig from_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
      if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
  }
};

}  // namespace rrg
