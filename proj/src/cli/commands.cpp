#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "rmtlab/cli.hpp"
#include "rmtlab/jack_oracle.hpp"
#include "rmtlab/mc.hpp"
#include "rmtlab/samplers.hpp"

namespace rmtlab {

namespace {

using json = nlohmann::json;

struct Table {
  std::vector<std::string> columns;
  json rows = json::array();
};

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + '"';
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  }
  return v.dump();
}

json number(double d) { return std::isfinite(d) ? json(d) : json(nullptr); }

void write_table(const Manifest& m, const Table& t, std::ostream& out) {
  if (m.format == OutputFormat::kJson) {
    json j{{"manifest", m.to_json()}, {"columns", t.columns}, {"rows", t.rows}};
    out << j.dump(2) << '\n';
    return;
  }
  out << m.to_comment_block();
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_cell(r.value(t.columns[i], json()));
    out << '\n';
  }
}

void reject_unused(const Config& cfg) {
  const auto u = cfg.unused_keys();
  if (u.empty()) return;
  cfg.fail(u.front(), "unknown key for this command");
}

std::string join(const std::vector<int>& v, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v, char sep = ';') {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
  return os.str();
}

FormulaOptions formula_options(const Config& cfg) {
  FormulaOptions o;
  const std::string meth = cfg.get_string("method", std::string("cluster"));
  if (meth == "cluster")
    o.method = ContourMethod::kCluster;
  else if (meth == "nested")
    o.method = ContourMethod::kNested;
  else
    cfg.fail("method", "expected cluster or nested");
  o.nodes_per_circle = static_cast<int>(cfg.get_int("nodes", 32));
  if (o.nodes_per_circle < 4) cfg.fail("nodes", "must be at least 4");
  return o;
}

int max_of(const std::vector<int>& v) { return v.empty() ? 1 : *std::max_element(v.begin(), v.end()); }

// ---------------------------------------------------------------- eval

int run_eval(const Manifest& m, std::ostream& out) {
  const Config& cfg = m.params;
  const std::string formula = cfg.get_string("formula");
  Table t{{"formula", "value", "error_estimate", "method"}};
  auto emit = [&](const std::string& what, const FormulaResult& r) {
    t.rows.push_back({{"formula", what}, {"value", number(r.value)}, {"error_estimate", number(r.error_estimate)},
                      {"method", r.method}});
  };
  if (formula == "general_beta" || formula == "beta2" || formula == "oracle") {
    const auto Ts = cfg.get_int_list("Ts");
    MomentRequest req(schedule_from_config(cfg, max_of(Ts)));
    req.Ts = Ts;
    if (formula == "beta2") {
      req.cs = cfg.get_double_list("cs");
    } else {
      req.ks = cfg.get_int_list("ks");
      req.theta = cfg.get_theta();
    }
    const FormulaOptions opt = formula_options(cfg);
    reject_unused(cfg);
    if (formula == "oracle") {
      const Rational v = exact_joint_moment(req.ks, req.Ts, req.schedule, req.theta);
      emit("oracle", {to_double(v), 0.0, "exact " + v.get_str()});
    } else if (formula == "beta2") {
      emit("beta2", finite_moments_beta2(req, opt));
    } else {
      emit("general_beta", finite_moments_general_beta(req, opt));
    }
  } else if (formula == "ginibre") {
    const auto cs = cfg.get_double_list("cs");
    const auto Ts = cfg.get_int_list("Ts");
    const int N = static_cast<int>(cfg.get_int("N"));
    const bool edge = cfg.get_bool("edge_rescale", false);
    const FormulaOptions opt = formula_options(cfg);
    reject_unused(cfg);
    std::vector<double> shift;
    if (edge)
      for (std::size_t i = 0; i < cs.size() && i < Ts.size(); ++i) shift.push_back(cs[i] * (Ts[i] + 1) * std::log(N));
    emit("ginibre", ginibre_moments_beta2(cs, Ts, N, shift, opt));
  } else if (formula == "limit_shape") {
    const int k = static_cast<int>(cfg.get_int("k"));
    LimitParams lp{cfg.get_double_list("alpha_hat"), cfg.get_double_list("M_hat")};
    const int T = static_cast<int>(cfg.get_int("T", lp.length()));
    reject_unused(cfg);
    emit("limit_shape", limit_shape_moment(k, lp, T));
  } else if (formula == "covariance") {
    const int k1 = static_cast<int>(cfg.get_int("k1")), k2 = static_cast<int>(cfg.get_int("k2"));
    LimitParams lp{cfg.get_double_list("alpha_hat"), cfg.get_double_list("M_hat")};
    const int T1 = static_cast<int>(cfg.get_int("T1", lp.length()));
    const int T2 = static_cast<int>(cfg.get_int("T2", T1));
    const ThetaParam th = cfg.get_theta();
    reject_unused(cfg);
    emit("covariance", global_covariance(k1, k2, T1, T2, lp, th));
  } else if (formula == "local") {
    const auto ks = cfg.get_int_list("ks");
    const auto gammas = cfg.get_double_list("gammas");
    const ThetaParam th = cfg.get_theta();
    const FormulaOptions opt = formula_options(cfg);
    reject_unused(cfg);
    emit("local", local_moment_general_beta(ks, gammas, th, opt));
  } else if (formula == "laplace") {
    const auto cs = cfg.get_double_list("cs");
    const auto T_hats = cfg.get_double_list("T_hats");
    reject_unused(cfg);
    emit("laplace", interpolating_laplace(cs, T_hats));
  } else {
    cfg.fail("formula", "expected one of general_beta, beta2, oracle, ginibre, limit_shape, covariance, local, laplace");
  }
  write_table(m, t, out);
  return 0;
}

// ---------------------------------------------------------------- mc

// "p1@2*p0.5@1": product of P_c(y^(T)) factors.
SpectrumStatistic parse_statistic(const std::string& text, const Config& cfg) {
  SpectrumStatistic st;
  st.id = text;
  std::stringstream ss(text);
  std::string f;
  while (std::getline(ss, f, '*')) {
    const auto at = f.find('@');
    if (f.size() < 4 || f[0] != 'p' || at == std::string::npos) cfg.fail("stats", "expected factors p<c>@<T>, got '" + f + "'");
    PowerSumFactor pf;
    try {
      std::size_t used = 0;
      pf.c = std::stod(f.substr(1, at - 1), &used);
      if (used != at - 1) throw std::invalid_argument("c");
      pf.T = std::stoi(f.substr(at + 1), &used);
      if (used != f.size() - at - 1) throw std::invalid_argument("T");
    } catch (const std::exception&) {
      cfg.fail("stats", "cannot parse factor '" + f + "'");
    }
    if (!(pf.c > 0) || pf.T < 1) cfg.fail("stats", "factor '" + f + "' needs c > 0 and T >= 1");
    st.factors.push_back(pf);
  }
  return st;
}

std::vector<SpectrumStatistic> parse_statistics(const Config& cfg) {
  std::vector<SpectrumStatistic> out;
  std::stringstream ss(cfg.get_string("stats"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (!item.empty()) out.push_back(parse_statistic(item, cfg));
  }
  if (out.empty()) cfg.fail("stats", "no statistics given");
  return out;
}

BetaClass beta_from_config(const Config& cfg) {
  const long long b = cfg.get_int("beta", 2);
  if (b != 1 && b != 2 && b != 4) cfg.fail("beta", "expected 1, 2 or 4");
  return beta_class(static_cast<int>(b));
}

ThetaParam theta_of(BetaClass b) {
  return ThetaParam(b == BetaClass::kReal ? Rational(1, 2) : b == BetaClass::kComplex ? Rational(1) : Rational(2));
}

// Formula reference for a statistic when one is available.
std::optional<double> statistic_reference(const SpectrumExperiment& s, const SpectrumStatistic& st) {
  std::vector<PowerSumFactor> f = st.factors;
  std::stable_sort(f.begin(), f.end(), [](const auto& a, const auto& b) { return a.T > b.T; });
  std::vector<int> Ts;
  for (const auto& x : f) Ts.push_back(x.T);
  if (s.ensemble == Ensemble::kGinibreProduct) {
    if (s.beta != BetaClass::kComplex) return std::nullopt;
    std::vector<double> cs, shift;
    for (const auto& x : f) {
      cs.push_back(x.c);
      shift.push_back(x.c * x.log_shift);
    }
    return ginibre_moments_beta2(cs, Ts, s.N, shift).value;
  }
  std::vector<int> ks;
  for (const auto& x : f) {
    if (x.c != std::round(x.c) || x.log_shift != 0.0) return std::nullopt;
    ks.push_back(static_cast<int>(x.c));
  }
  return to_double(exact_joint_moment(ks, Ts, s.schedule, theta_of(s.beta)));
}

int run_mc_command(const Manifest& m, std::ostream& out) {
  const Config& cfg = m.params;
  SpectrumExperiment s;
  const std::string ens = cfg.get_string("ensemble", std::string("jacobi"));
  s.beta = beta_from_config(cfg);
  s.stats = parse_statistics(cfg);
  int T_max = 1;
  for (const auto& st : s.stats)
    for (const auto& f : st.factors) T_max = std::max(T_max, f.T);
  const std::string rescale = cfg.get_string("rescale", std::string("none"));
  if (ens == "jacobi" || ens == "jacobi_one_step") {
    s.ensemble = ens == "jacobi" ? Ensemble::kJacobiProduct : Ensemble::kJacobiOneStep;
    s.schedule = schedule_from_config(cfg, T_max);
    s.N = s.schedule.N();
    if (rescale != "none") cfg.fail("rescale", "only the Ginibre ensemble supports rescaling");
  } else if (ens == "ginibre") {
    s.ensemble = Ensemble::kGinibreProduct;
    s.N = static_cast<int>(cfg.get_int("N"));
    if (s.N < 1) cfg.fail("N", "must be positive");
    if (rescale == "edge") {
      for (auto& st : s.stats)
        for (auto& f : st.factors) f.log_shift = (f.T + 1) * std::log(static_cast<double>(s.N));
    } else if (rescale != "none") {
      cfg.fail("rescale", "expected none or edge");
    }
  } else {
    cfg.fail("ensemble", "expected jacobi, jacobi_one_step or ginibre");
  }
  s.samples = cfg.get_int("samples");
  if (s.samples < 2) cfg.fail("samples", "need at least 2");
  s.task_size = static_cast<int>(cfg.get_int("task_size", 1000));
  if (s.task_size < 1) cfg.fail("task_size", "must be positive");
  const bool compare = cfg.get_bool("compare", false);
  const double gate = cfg.get_double("sigma_gate", kDefaultSigmaGate);
  reject_unused(cfg);
  s.seed = m.seed;
  s.threads = m.threads;

  const auto est = run_mc(make_experiment(s));
  Table t{{"stat_id", "mean", "stderr", "count", "seed", "z_score", "reference", "verdict"}};
  int failures = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    json row{{"stat_id", est[i].stat_id},
             {"mean", number(est[i].mean)},
             {"stderr", number(est[i].std_error())},
             {"count", est[i].count},
             {"seed", std::to_string(est[i].seed)},
             {"z_score", nullptr},
             {"reference", nullptr},
             {"verdict", "none"}};
    if (compare) {
      if (const auto ref = statistic_reference(s, s.stats[i])) {
        const Verdict v = compare_report(est[i], *ref, gate);
        row["z_score"] = number(v.z_score);
        row["reference"] = number(*ref);
        row["verdict"] = v.pass ? "pass" : "fail";
        failures += !v.pass;
      }
    }
    t.rows.push_back(row);
  }
  write_table(m, t, out);
  return failures ? 1 : 0;
}

// ---------------------------------------------------------------- verify

struct VerifyRows {
  Table table{{"stat_id", "mean", "stderr", "count", "seed", "z_score", "reference", "verdict"}};
  int failures = 0;

  // Deterministic comparison; z_score is the relative error over the tolerance.
  void exact(const std::string& id, double value, double err, double ref, double tol, std::uint64_t seed) {
    const double rel = std::abs(value - ref) / std::max(std::abs(ref), 1e-300);
    const bool pass = rel <= tol;
    failures += !pass;
    table.rows.push_back({{"stat_id", id}, {"mean", number(value)}, {"stderr", number(err)}, {"count", 0},
                          {"seed", std::to_string(seed)}, {"z_score", number(rel / tol)}, {"reference", number(ref)},
                          {"verdict", pass ? "pass" : "fail"}});
  }
  void error(const std::string& id, const std::string& what, std::uint64_t seed) {
    ++failures;
    table.rows.push_back({{"stat_id", id + " (" + what + ")"}, {"mean", nullptr}, {"stderr", nullptr}, {"count", 0},
                          {"seed", std::to_string(seed)}, {"z_score", nullptr}, {"reference", nullptr},
                          {"verdict", "fail"}});
  }
  void mc(const Verdict& v) {
    failures += !v.pass;
    table.rows.push_back({{"stat_id", v.stat_id}, {"mean", number(v.mean)}, {"stderr", number(v.std_error)},
                          {"count", v.count}, {"seed", std::to_string(v.seed)}, {"z_score", number(v.z_score)},
                          {"reference", number(v.reference)}, {"verdict", v.pass ? "pass" : "fail"}});
  }
};

// All (ks, Ts) with m factors, k_i <= kmax, Tmax >= T_1 >= ... >= T_m >= 1.
void moment_grid(int m, int kmax, int Tmax, std::vector<std::pair<std::vector<int>, std::vector<int>>>& out) {
  std::vector<int> ks(m, 1), Ts(m, 1);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == m) {
      out.emplace_back(ks, Ts);
      return;
    }
    for (int T = 1; T <= (i ? Ts[i - 1] : Tmax); ++T)
      for (int k = 1; k <= kmax; ++k) {
        Ts[i] = T;
        ks[i] = k;
        self(self, i + 1);
      }
  };
  rec(rec, 0);
}

// E y^c at N = 1: prod_tau B(theta alpha + c, theta M) / B(theta alpha, theta M).
double beta_product_moment(const ProcessSchedule& s, const ThetaParam& theta, double c, int T) {
  const double th = theta.to_double();
  double lv = 0;
  for (int tau = 1; tau <= T; ++tau) {
    const double a = th * s.step(tau).alpha_d(), b = th * s.step(tau).M_d();
    if (b == 0) continue;
    lv += std::lgamma(a + c) + std::lgamma(a + b) - std::lgamma(a) - std::lgamma(a + b + c);
  }
  return std::exp(lv);
}

std::string moment_id(const std::string& what, const std::vector<int>& ks, const std::vector<int>& Ts) {
  return what + " k=" + join(ks) + " T=" + join(Ts);
}

int run_verify(const Manifest& m, std::ostream& out) {
  const Config& cfg = m.params;
  const int kmax = static_cast<int>(cfg.get_int("kmax", 2));
  const int mmax = static_cast<int>(cfg.get_int("mmax", 2));
  const ThetaParam theta = cfg.get_theta();
  const ProcessSchedule sched = schedule_from_config(cfg);
  const int Tmax = static_cast<int>(cfg.get_int("Tmax", sched.length()));
  const auto cs = cfg.get_double_list("cs", std::vector<double>{0.3, 1.0, 2.5});
  const long long samples = cfg.get_int("samples", 0);
  const double gate = cfg.get_double("sigma_gate", kDefaultSigmaGate);
  const FormulaOptions opt = formula_options(cfg);
  reject_unused(cfg);
  if (kmax < 1 || mmax < 1) throw ConfigError(cfg.source() + ": kmax and mmax must be positive");
  if (Tmax < 1 || Tmax > sched.length()) throw ConfigError(cfg.source() + ": Tmax must lie in [1, schedule length]");

  VerifyRows rows;
  const bool theta_one = theta.value() == 1;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> grid;
  for (int mm = 1; mm <= mmax; ++mm) moment_grid(mm, kmax, Tmax, grid);
  for (const auto& [ks, Ts] : grid) {
    MomentRequest req(sched);
    req.ks = ks;
    req.Ts = Ts;
    req.theta = theta;
    const double ref = to_double(exact_joint_moment(ks, Ts, sched, theta));
    try {
      const auto r = finite_moments_general_beta(req, opt);
      rows.exact(moment_id("general_beta", ks, Ts), r.value, r.error_estimate, ref, m.tolerance, m.seed);
    } catch (const std::exception& ex) {
      rows.error(moment_id("general_beta", ks, Ts), ex.what(), m.seed);
    }
    if (theta_one) {
      req.cs.assign(ks.begin(), ks.end());
      try {
        const auto r = finite_moments_beta2(req, opt);
        rows.exact(moment_id("beta2", ks, Ts), r.value, r.error_estimate, ref, m.tolerance, m.seed);
      } catch (const std::exception& ex) {
        rows.error(moment_id("beta2", ks, Ts), ex.what(), m.seed);
      }
    }
  }
  if (sched.N() == 1) {
    for (double c : cs)
      for (int T = 1; T <= Tmax; ++T) {
        const double ref = beta_product_moment(sched, theta, c, T);
        const std::string id = " c=" + join(std::vector<double>{c}) + " T=" + std::to_string(T);
        MomentRequest req(sched);
        req.Ts = {T};
        req.theta = theta;
        try {
          if (theta_one) {
            req.cs = {c};
            const auto r = finite_moments_beta2(req, opt);
            rows.exact("closed_form beta2" + id, r.value, r.error_estimate, ref, m.tolerance, m.seed);
          }
          if (c == std::round(c)) {
            req.ks = {static_cast<int>(c)};
            const auto r = finite_moments_general_beta(req, opt);
            rows.exact("closed_form general_beta" + id, r.value, r.error_estimate, ref, m.tolerance, m.seed);
          }
        } catch (const std::exception& ex) {
          rows.error("closed_form" + id, ex.what(), m.seed);
        }
      }
  }
  if (samples > 0) {
    const Rational& th = theta.value();
    if (th != Rational(1, 2) && th != 1 && th != 2)
      throw ConfigError(cfg.source() + ": Monte Carlo needs theta in {1/2, 1, 2}");
    SpectrumExperiment s;
    s.ensemble = Ensemble::kJacobiProduct;
    s.schedule = sched;
    s.beta = th == 1 ? BetaClass::kComplex : th == 2 ? BetaClass::kQuaternion : BetaClass::kReal;
    for (int T = 1; T <= Tmax; ++T)
      for (int k = 1; k <= kmax; ++k)
        s.stats.push_back({"mc p" + std::to_string(k) + "@" + std::to_string(T), {{static_cast<double>(k), T, 0.0}}, 0.0});
    s.samples = samples;
    s.seed = m.seed;
    s.threads = m.threads;
    const auto est = run_mc(make_experiment(s));
    for (std::size_t i = 0; i < est.size(); ++i) {
      const auto& f = s.stats[i].factors[0];
      const double ref = to_double(exact_joint_moment({static_cast<int>(f.c)}, {f.T}, sched, theta));
      rows.mc(compare_report(est[i], ref, gate));
    }
  }
  write_table(m, rows.table, out);
  return rows.failures ? 1 : 0;
}

// ---------------------------------------------------------------- limit-shape

int run_limit_shape(const Manifest& m, std::ostream& out) {
  const Config& cfg = m.params;
  LimitParams lp{cfg.get_double_list("alpha_hat"), cfg.get_double_list("M_hat")};
  const int T = static_cast<int>(cfg.get_int("T", lp.length()));
  const int kmax = static_cast<int>(cfg.get_int("kmax", 4));
  reject_unused(cfg);
  if (kmax < 1) throw ConfigError(cfg.source() + ": kmax must be positive");
  Table t{{"k", "T", "value", "error_estimate"}};
  for (int k = 1; k <= kmax; ++k) {
    const auto r = limit_shape_moment(k, lp, T);
    t.rows.push_back({{"k", k}, {"T", T}, {"value", number(r.value)}, {"error_estimate", number(r.error_estimate)}});
  }
  write_table(m, t, out);
  return 0;
}

// ---------------------------------------------------------------- edge

int run_edge(const Manifest& m, std::ostream& out) {
  const Config& cfg = m.params;
  const int N = static_cast<int>(cfg.get_int("N", 100));
  const double T_hat_max = cfg.get_double("T_hat_max", 10.0);
  const int top = static_cast<int>(cfg.get_int("top", 4));
  const int every = static_cast<int>(cfg.get_int("every", 1));
  const long long trajectories = cfg.get_int("samples", 1);
  const BetaClass beta = beta_from_config(cfg);
  reject_unused(cfg);
  if (N < 1 || top < 1 || top > N || every < 1 || trajectories < 1 || !(T_hat_max > 0))
    throw ConfigError(cfg.source() + ": edge needs N >= top >= 1, every >= 1, samples >= 1, T_hat_max > 0");
  const int T_max = static_cast<int>(std::floor(N * T_hat_max));
  if (T_max < 1) throw ConfigError(cfg.source() + ": N * T_hat_max must be at least 1");
  std::vector<int> times;
  for (int T = every; T <= T_max; T += every) times.push_back(T);
  if (times.empty() || times.back() != T_max) times.push_back(T_max);

  Table t{{"sample", "T", "T_hat", "i", "log_rescaled"}};
  for (long long s = 0; s < trajectories; ++s) {
    Rng rng(task_seed(m.seed, static_cast<std::uint64_t>(s)));
    const auto spectra = ginibre_product_squared_singular_values(beta, N, T_max, rng, times);
    for (const auto& sp : spectra) {
      const double shift = (sp.time_index + 1) * std::log(static_cast<double>(N));
      for (int i = 0; i < top; ++i)
        t.rows.push_back({{"sample", s},
                          {"T", sp.time_index},
                          {"T_hat", static_cast<double>(sp.time_index) / N},
                          {"i", i + 1},
                          {"log_rescaled", number(sp.log_values[i] - shift)}});
    }
  }
  write_table(m, t, out);
  return 0;
}

}  // namespace

int run_manifest(const Manifest& m, std::ostream& out) {
  if (m.command == "eval") return run_eval(m, out);
  if (m.command == "mc") return run_mc_command(m, out);
  if (m.command == "verify") return run_verify(m, out);
  if (m.command == "limit-shape") return run_limit_shape(m, out);
  if (m.command == "edge") return run_edge(m, out);
  throw ConfigError("unknown command '" + m.command + "'");
}

}  // namespace rmtlab
