#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtlab/formulas.hpp"
#include "rmtlab/schedule.hpp"

namespace rmtlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` configuration. Lines starting with '#' and blank lines are skipped.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for values that did not come from a file
  };

  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_text(const std::string& text, const std::string& source = "<config>");

  void set(const std::string& key, const std::string& value, int line = 0);
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  // Typed access; each marks the key as used. Malformed values throw ConfigError naming key and line.
  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const;
  long long get_int(const std::string& key, const std::optional<long long>& fallback = std::nullopt) const;
  double get_double(const std::string& key, const std::optional<double>& fallback = std::nullopt) const;
  Rational get_rational(const std::string& key, const std::optional<Rational>& fallback = std::nullopt) const;
  bool get_bool(const std::string& key, const std::optional<bool>& fallback = std::nullopt) const;
  std::vector<int> get_int_list(const std::string& key, const std::optional<std::vector<int>>& fallback = std::nullopt) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::optional<std::vector<double>>& fallback = std::nullopt) const;
  ThetaParam get_theta(const std::string& key = "theta") const;

  // Keys never read through a getter.
  std::vector<std::string> unused_keys() const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  const Entry* find(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

// N, then `steps`, `alpha`, `M` for a constant schedule, with `step.k.alpha` / `step.k.M` overriding step k (1-based).
// The length is the largest of `steps`, the largest k mentioned and min_length.
ProcessSchedule schedule_from_config(const Config& cfg, int min_length = 1);

enum class OutputFormat { kCsv, kJson };

struct Manifest {
  std::string command;  // eval, mc, verify, limit-shape, edge
  Config params;
  std::uint64_t seed = 1;
  int threads = 1;
  double tolerance = 1e-7;
  OutputFormat format = OutputFormat::kCsv;
  std::string out;  // empty for stdout

  nlohmann::json to_json() const;
  // `# key = value` lines that `load_config_file` reads back.
  std::string to_comment_block() const;
};

const std::vector<std::string>& manifest_commands();

// Reads a plain config, a CSV output with an embedded manifest block, or a JSON output with a "manifest" object.
Config load_config_file(const std::string& path);

// Fills command, seed, threads, tolerance and format from `command`, `seed`, ... keys when present.
Manifest manifest_from_config(const Config& cfg);

// Writes the artifact to `out` and returns the exit status (nonzero on any failed verdict).
int run_manifest(const Manifest& m, std::ostream& out);

}  // namespace rmtlab
