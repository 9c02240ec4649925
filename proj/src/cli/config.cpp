#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rmtlab/cli.hpp"

namespace rmtlab {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class T>
bool parse_number(const std::string& s, T& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected `key = value`, got '" + s + "'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(source + ":" + std::to_string(line) + ": bad key '" + key + "'");
    if (c.entries_.count(key))
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "' repeats line " +
                        std::to_string(c.entries_[key].line));
    c.entries_[key] = {value, line};
  }
  return c;
}

Config Config::parse_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

void Config::set(const std::string& key, const std::string& value, int line) {
  if (!valid_key(key)) throw ConfigError(source_ + ": bad key '" + key + "'");
  entries_[key] = {value, line};
}

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  std::string where = source_;
  if (it != entries_.end() && it->second.line > 0) where += ":" + std::to_string(it->second.line);
  throw ConfigError(where + ": key '" + key + "': " + what);
}

std::string Config::get_string(const std::string& key, const std::optional<std::string>& fallback) const {
  if (const Entry* e = find(key)) return e->value;
  if (fallback) return *fallback;
  fail(key, "missing");
}

long long Config::get_int(const std::string& key, const std::optional<long long>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  long long v = 0;
  if (!parse_number(e->value, v)) fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

double Config::get_double(const std::string& key, const std::optional<double>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  double v = 0;
  if (!parse_number(e->value, v)) {
    // Fractions are accepted wherever a real is.
    try {
      return to_double(parse_rational(e->value));
    } catch (const std::invalid_argument&) {
      fail(key, "expected a number, got '" + e->value + "'");
    }
  }
  return v;
}

Rational Config::get_rational(const std::string& key, const std::optional<Rational>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  try {
    return parse_rational(e->value);
  } catch (const std::invalid_argument& ex) {
    fail(key, "expected an exact fraction p/q, got '" + e->value + "' (" + ex.what() + ")");
  }
}

bool Config::get_bool(const std::string& key, const std::optional<bool>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(key, "expected true/false, got '" + e->value + "'");
}

std::vector<int> Config::get_int_list(const std::string& key, const std::optional<std::vector<int>>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  std::vector<int> out;
  for (const auto& s : split_list(e->value)) {
    int v = 0;
    if (!parse_number(s, v)) fail(key, "expected a comma separated list of integers, got '" + e->value + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::optional<std::vector<double>>& fallback) const {
  const Entry* e = find(key);
  if (!e) {
    if (fallback) return *fallback;
    fail(key, "missing");
  }
  std::vector<double> out;
  for (const auto& s : split_list(e->value)) {
    double v = 0;
    if (!parse_number(s, v)) {
      try {
        v = to_double(parse_rational(s));
      } catch (const std::invalid_argument&) {
        fail(key, "expected a comma separated list of numbers, got '" + e->value + "'");
      }
    }
    out.push_back(v);
  }
  return out;
}

ThetaParam Config::get_theta(const std::string& key) const {
  const Rational r = get_rational(key, Rational(1));
  try {
    return ThetaParam(r);
  } catch (const std::invalid_argument& ex) {
    fail(key, ex.what());
  }
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

ProcessSchedule schedule_from_config(const Config& cfg, int min_length) {
  const long long N = cfg.get_int("N");
  if (N < 1) cfg.fail("N", "must be positive");
  int length = static_cast<int>(cfg.get_int("steps", min_length));
  if (length < 1) cfg.fail("steps", "must be positive");
  length = std::max(length, min_length);
  std::map<int, std::map<std::string, std::string>> overrides;
  for (const auto& [k, e] : cfg.entries()) {
    if (k.rfind("step.", 0) != 0) continue;
    const auto dot = k.find('.', 5);
    int idx = 0;
    if (dot == std::string::npos || !parse_number(k.substr(5, dot - 5), idx) || idx < 1)
      cfg.fail(k, "expected step.<k>.alpha or step.<k>.M with k >= 1");
    const std::string field = k.substr(dot + 1);
    if (field != "alpha" && field != "M") cfg.fail(k, "unknown step field '" + field + "'");
    overrides[idx][field] = k;
    length = std::max(length, idx);
  }
  const Rational alpha = cfg.get_rational("alpha", Rational(1));
  const Rational M = cfg.get_rational("M", Rational(1));
  std::vector<JacobiParams> steps;
  for (int t = 1; t <= length; ++t) {
    JacobiParams p{alpha, M};
    if (overrides.count(t)) {
      const auto& o = overrides[t];
      if (o.count("alpha")) p.alpha = cfg.get_rational(o.at("alpha"));
      if (o.count("M")) p.M = cfg.get_rational(o.at("M"));
    }
    steps.push_back(p);
  }
  try {
    return ProcessSchedule(static_cast<int>(N), steps);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(cfg.source() + ": schedule: " + ex.what());
  }
}

const std::vector<std::string>& manifest_commands() {
  static const std::vector<std::string> c{"eval", "mc", "verify", "limit-shape", "edge"};
  return c;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, e] : this->params.entries()) params[k] = e.value;
  std::ostringstream tol;
  tol.precision(17);
  tol << tolerance;
  return {{"command", command},
          {"seed", std::to_string(seed)},
          {"threads", threads},
          {"tolerance", tol.str()},
          {"format", format == OutputFormat::kCsv ? "csv" : "json"},
          {"params", params}};
}

std::string Manifest::to_comment_block() const {
  std::ostringstream os;
  os.precision(17);
  os << "# rmtlab manifest\n";
  os << "# command = " << command << '\n';
  os << "# seed = " << seed << '\n';
  os << "# threads = " << threads << '\n';
  os << "# tolerance = " << tolerance << '\n';
  os << "# format = " << (format == OutputFormat::kCsv ? "csv" : "json") << '\n';
  for (const auto& [k, e] : params.entries()) os << "# " << k << " = " << e.value << '\n';
  os << "# end manifest\n";
  return os.str();
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(path + ": invalid JSON: " + ex.what());
    }
    if (!j.contains("manifest")) throw ConfigError(path + ": JSON input needs a \"manifest\" object");
    const auto& m = j["manifest"];
    Config c = Config::parse_text("", path);
    for (const char* k : {"command", "seed", "threads", "tolerance", "format"})
      if (m.contains(k)) c.set(k, m[k].is_string() ? m[k].get<std::string>() : m[k].dump());
    if (m.contains("params"))
      for (const auto& [k, v] : m["params"].items()) c.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    return c;
  }
  if (text.rfind("# rmtlab manifest", 0) == 0) {
    std::istringstream lines(text);
    std::string raw, body;
    std::getline(lines, raw);
    while (std::getline(lines, raw) && raw != "# end manifest") body += raw.substr(std::min<std::size_t>(2, raw.size())) + '\n';
    return Config::parse_text(body, path);
  }
  return Config::parse_text(text, path);
}

Manifest manifest_from_config(const Config& cfg) {
  Manifest m;
  m.params = cfg;
  m.command = cfg.get_string("command", std::string());
  if (cfg.has("seed")) {
    std::uint64_t s = 0;
    const std::string v = cfg.get_string("seed");
    if (!parse_number(v, s)) cfg.fail("seed", "expected an unsigned 64-bit integer, got '" + v + "'");
    m.seed = s;
  }
  m.threads = static_cast<int>(cfg.get_int("threads", 1));
  if (m.threads < 1) cfg.fail("threads", "must be positive");
  m.tolerance = cfg.get_double("tolerance", 1e-7);
  if (!(m.tolerance > 0)) cfg.fail("tolerance", "must be positive");
  const std::string f = cfg.get_string("format", std::string("csv"));
  if (f == "csv")
    m.format = OutputFormat::kCsv;
  else if (f == "json")
    m.format = OutputFormat::kJson;
  else
    cfg.fail("format", "expected csv or json");
  m.out = cfg.get_string("out", std::string());
  // These keys live in the manifest itself, not in the command parameters.
  Config rest = Config::parse_text("", cfg.source());
  for (const auto& [k, e] : cfg.entries())
    if (k != "command" && k != "seed" && k != "threads" && k != "tolerance" && k != "format" && k != "out")
      rest.set(k, e.value, e.line);
  m.params = rest;
  return m;
}

}  // namespace rmtlab
