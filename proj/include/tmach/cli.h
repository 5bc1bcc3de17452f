#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tmach/entropy.h"
#include "tmach/hammat.h"
#include "tmach/json_io.h"

namespace tmach::cli {

enum ExitCode : int { ok = 0, validation = 2, internal = 3 };

struct RunConfig {
  Rational alpha{3, 10};
  Rational beta{3, 10};
  Rational g{1};
  Rational T{1};
  int N = 3;
  int nmax = 1;
  int window = 10;
  std::string delta = "kronecker";
  int k = 3;
  int order = 8;
  Rational dt{1, 10};
  std::string out = ".";
  std::set<std::string> format{"json", "csv", "text"};
  std::vector<int> start;  // flux initial state; empty means one quantum per region
  std::string omega1 = "auto";
  std::string omega2 = "auto";
  double tmax = 10.0;
  int steps = 200;
  int offset = 1;

  /// Where each key's value came from: "default", "config" or "flag".
  std::map<std::string, std::string> sources;

  /// Sets one key from its text form. Throws std::invalid_argument.
  void set(const std::string& key, const std::string& value, const std::string& source);
  /// Applies a JSON object whose keys mirror the flag names.
  void apply(const ojson& config);

  [[nodiscard]] ModelParams model() const;
  [[nodiscard]] EntropyParams entropy() const;
  [[nodiscard]] std::vector<int> start_state() const;
  [[nodiscard]] bool wants(const std::string& fmt) const { return format.count(fmt) > 0; }
};

/// Every key with its resolved value and source.
ojson to_json(const RunConfig& c);

/// Subcommands: expand, evolve, entropy, bogo. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tmach::cli
