#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "utmq/data.hpp"
#include "utmq/solver.hpp"

namespace utmq {

// Flat INI-style configuration: `key = value` lines grouped under
// `[section]` headers, `;` or `#` comments, lists comma-separated.
// Every key must be consumed by the command that runs; leftovers are
// configuration errors.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& sec, const std::string& key) const;
  std::string get(const std::string& sec, const std::string& key);
  std::string get_or(const std::string& sec, const std::string& key, std::string dflt);
  double get_num(const std::string& sec, const std::string& key);
  double get_num_or(const std::string& sec, const std::string& key, double dflt);
  int get_int_or(const std::string& sec, const std::string& key, int dflt);
  std::vector<double> get_list(const std::string& sec, const std::string& key);
  std::vector<double> get_list_or(const std::string& sec, const std::string& key,
                                  std::vector<double> dflt);
  std::vector<std::string> get_strings(const std::string& sec, const std::string& key);

  // consume `prefix.*` keys into a parameter map (registry presets)
  std::map<std::string, double> take_params(const std::string& sec,
                                            const std::string& prefix);

  void reject_unused() const;

 private:
  struct Entry {
    std::string key, value;
    mutable bool used = false;
  };
  std::map<std::string, std::vector<Entry>> sections_;
  const Entry* find(const std::string& sec, const std::string& key) const;
};

struct CliOverrides {
  std::optional<int> threads;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct RunResult {
  std::string command;
  bool ok = false;
  std::vector<CheckResult> checks;
  std::string out_dir;
};

// Executes the configured command and writes results.csv, report.json and
// plot.gp into the output directory.
RunResult run_command(Config& cfg, const CliOverrides& overrides);

// exposed for tests
ProblemData problem_from_config(Config& cfg);
EvalRequest eval_from_config(Config& cfg);

}  // namespace utmq
