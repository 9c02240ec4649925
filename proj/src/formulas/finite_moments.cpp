#include <algorithm>
#include <cmath>
#include <map>

#include "cluster.hpp"
#include "rmtlab/formulas.hpp"
#include "rmtlab/special.hpp"

namespace rmtlab {

namespace {

struct StepGroup {
  double alpha;
  double M;
  bool integer_M;
  long count;
};

std::vector<StepGroup> group_steps(const ProcessSchedule& s, int T) {
  if (T > s.length())
    throw std::invalid_argument("schedule has " + std::to_string(s.length()) + " steps, formula needs " + std::to_string(T));
  std::map<std::pair<Rational, Rational>, long> counts;
  for (int tau = 1; tau <= T; ++tau) ++counts[{s.step(tau).alpha, s.step(tau).M}];
  std::vector<StepGroup> out;
  for (const auto& [k, n] : counts) out.push_back({to_double(k.first), to_double(k.second), k.second.get_den() == 1, n});
  return out;
}

void check_times(const std::vector<int>& Ts, std::size_t m) {
  if (Ts.size() != m || m == 0) throw std::invalid_argument("moment request: need one time per degree");
  for (std::size_t i = 0; i < m; ++i) {
    if (Ts[i] < 1) throw std::invalid_argument("moment request: times must be positive");
    if (i > 0 && Ts[i] > Ts[i - 1]) throw std::invalid_argument("moment request: times must be non-increasing");
  }
}

// min |a theta - b| over nonzero integer pairs with |a|, |b| <= K
double lattice_gap(double theta, int K) {
  double g = std::numeric_limits<double>::infinity();
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const double v = std::abs(a * theta - b);
      if (v > 1e-12) g = std::min(g, v);
    }
  return g;
}

// Symmetric differences in h are even; extrapolate E(h), E(2h), E(3h) to h = 0 removing h^2 and h^4.
template <class F>
FormulaResult alpha_continuation(const ProcessSchedule& s, F&& eval) {
  Rational amin = s.step(1).alpha;
  for (const auto& st : s.steps()) amin = std::min(amin, st.alpha);
  Rational h(1, 100);
  if (h * 4 > amin) h = amin / 4;
  h.canonicalize();
  double E[3], err = 0;
  for (int j = 1; j <= 3; ++j) {
    const FormulaResult a = eval(s.shifted_alpha(h * j));
    const FormulaResult b = eval(s.shifted_alpha(-h * j));
    E[j - 1] = 0.5 * (a.value + b.value);
    err += a.error_estimate + b.error_estimate;
  }
  FormulaResult r;
  r.value = 1.5 * E[0] - 0.6 * E[1] + 0.1 * E[2];
  // Size of the last correction as a proxy for the neglected h^6 term.
  r.error_estimate = err + std::abs(E[0] - E[1]) * 1e-4;
  return r;
}

struct GeneralBetaSetup {
  double theta;
  int N;
  std::vector<int> block;
  std::vector<std::vector<StepGroup>> groups;  // per block
  int m;
};

cplx a_factor(const GeneralBetaSetup& g, int blk, cplx u) {
  const double th = g.theta;
  cplx v = u / (u + th * g.N);
  for (const auto& s : g.groups[blk])
    v *= ipow((u - th * (s.alpha - 1.0)) / (u - th * (s.alpha + s.M - 1.0)), s.count);
  return v;
}

FormulaResult general_beta_cluster(const MomentRequest& req, const ProcessSchedule& sched, int nodes, bool* collided) {
  GeneralBetaSetup g;
  g.theta = req.theta.to_double();
  g.N = sched.N();
  g.m = static_cast<int>(req.ks.size());
  for (int i = 0; i < g.m; ++i) {
    g.groups.push_back(group_steps(sched, req.Ts[i]));
    for (int j = 0; j < req.ks[i]; ++j) g.block.push_back(i);
  }
  const int K = static_cast<int>(g.block.size());
  const double th = g.theta;
  const cplx pole(-th * g.N, 0.0);

  detail::ClusterProblem p;
  p.nodes_per_circle = nodes;
  p.first_points = {pole};
  {
    // Residue of u/(u + theta N) at -theta N is -theta N.
    cplx w = -th * g.N;
    for (const auto& s : g.groups[0])
      w *= ipow((pole - th * (s.alpha - 1.0)) / (pole - th * (s.alpha + s.M - 1.0)), s.count);
    p.first_weights = {w};
  }
  p.seeds.resize(K);
  p.excluded.resize(K);
  for (int n = 1; n < K; ++n) {
    std::vector<cplx> pts;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) pts.push_back(pole + a * th - static_cast<double>(b));
    p.seeds[n] = dedupe_points(pts);
    for (const auto& s : g.groups[g.block[n]]) p.excluded[n].push_back(th * (s.alpha + s.M - 1.0));
  }
  p.extra_gap = lattice_gap(th, K + 1);
  if (collided) {
    double d = std::numeric_limits<double>::infinity();
    for (int n = 1; n < K; ++n)
      for (cplx s : p.seeds[n])
        for (cplx e : p.excluded[n]) d = std::min(d, std::abs(s - e));
    *collided = d < 1e-8;
    if (*collided) return {};
  }
  p.single = [&](int n, cplx u) { return a_factor(g, g.block[n], u); };
  p.pair = [&](int a, int b, cplx u, cplx v) {
    const cplx d = v - u;
    if (b == a + 1 && g.block[a] == g.block[b]) return d / ((d + 1.0) * (d - th));
    return d * (d + 1.0 - th) / ((d + 1.0) * (d - th));
  };
  const auto res = detail::solve_cluster(p);
  const double pref = std::pow(-th, -g.m);
  FormulaResult out;
  out.value = assert_real(res.value * pref, 1e-9, "finite_moments_general_beta");
  out.error_estimate = res.error_estimate * std::abs(pref);
  return out;
}

FormulaResult general_beta_nested(const MomentRequest& req, const FormulaOptions& opt) {
  GeneralBetaSetup g;
  g.theta = req.theta.to_double();
  g.N = req.schedule.N();
  g.m = static_cast<int>(req.ks.size());
  for (int i = 0; i < g.m; ++i) {
    g.groups.push_back(group_steps(req.schedule, req.Ts[i]));
    for (int j = 0; j < req.ks[i]; ++j) g.block.push_back(i);
  }
  const double th = g.theta;
  const ContourFamily fam = nested_contours_general_beta(req.ks, req.theta.value(), g.N, req.schedule, req.Ts);
  auto f = [&](std::span<const cplx> u) {
    cplx v = 1.0;
    const int K = static_cast<int>(u.size());
    for (int n = 0; n < K; ++n) {
      v *= a_factor(g, g.block[n], u[n]);
      for (int a = 0; a < n; ++a) {
        const cplx d = u[n] - u[a];
        if (n == a + 1 && g.block[a] == g.block[n]) {
          v *= d / ((d + 1.0) * (d - th));
        } else {
          v *= d * (d + 1.0 - th) / ((d + 1.0) * (d - th));
        }
      }
    }
    return v;
  };
  TensorOptions topt = opt.tensor;
  topt.throw_on_failure = true;
  const auto r = integrate_tensor(f, fam, topt);
  const double pref = std::pow(-th, -g.m);
  return {assert_real(r.value * pref, opt.realness_tol, "finite_moments_general_beta"), r.error_estimate * std::abs(pref),
          "nested"};
}

// ---- beta = 2 ----

struct Beta2Setup {
  int N;
  std::vector<double> cs;
  std::vector<std::vector<StepGroup>> groups;
};

cplx schedule_factor_beta2(const std::vector<StepGroup>& groups, double c, cplx u) {
  cplx v = 1.0;
  for (const auto& s : groups) {
    cplx f = 1.0;
    if (s.integer_M) {
      for (long l = 1; l <= static_cast<long>(s.M); ++l)
        f *= (u + c - s.alpha - static_cast<double>(l) + 1.0) / (u - s.alpha - static_cast<double>(l) + 1.0);
    } else {
      const cplx z = s.alpha - u;
      f = std::exp(lgamma_complex(z - c + s.M) + lgamma_complex(z) - lgamma_complex(z - c) - lgamma_complex(z + s.M));
    }
    v *= ipow(f, s.count);
  }
  return v;
}

cplx n_factor(int N, double c, cplx u) {
  cplx v = 1.0;
  for (int l = 1; l <= N; ++l) v *= (u + static_cast<double>(l - 1)) / (u + c + static_cast<double>(l - 1));
  return v;
}

// Residues of prod_l (u + l - 1)/(u + c + l - 1) at -c - l0 + 1.
void n_residues(int N, double c, std::vector<cplx>* pts, std::vector<cplx>* w) {
  for (int l0 = 1; l0 <= N; ++l0) {
    const double u0 = -c - l0 + 1;
    double v = u0 + l0 - 1;
    for (int l = 1; l <= N; ++l)
      if (l != l0) v *= (u0 + l - 1) / (u0 + c + l - 1);
    pts->push_back(u0);
    w->push_back(v);
  }
}

std::vector<cplx> beta2_exclusions(const std::vector<StepGroup>& groups, double reach) {
  std::vector<cplx> out;
  for (const auto& s : groups) {
    const int top = s.integer_M ? static_cast<int>(s.M) : static_cast<int>(std::ceil(reach - s.alpha)) + 2;
    for (int l = 1; l <= std::max(top, 1); ++l) out.emplace_back(s.alpha + l - 1, 0.0);
  }
  return dedupe_points(out);
}

cplx beta2_pair(const std::vector<double>& cs, int i, int j, cplx ui, cplx uj) {
  const double ci = cs[i], cj = cs[j];
  return (uj - ui) * (uj + cj - ui - ci) / ((uj - ui - ci) * (uj + cj - ui));
}

// Seeds for variable j: its own poles plus the images of earlier seed sets.
std::vector<std::vector<cplx>> shift_seeds(const std::vector<cplx>& first, const std::vector<std::vector<cplx>>& own,
                                           const std::vector<double>& cs) {
  const std::size_t m = cs.size();
  std::vector<std::vector<cplx>> S(m);
  S[0] = first;
  for (std::size_t j = 1; j < m; ++j) {
    std::vector<cplx> pts = own[j];
    for (std::size_t i = 0; i < j; ++i)
      for (cplx s : S[i]) {
        pts.push_back(s + cs[i]);
        pts.push_back(s - cs[j]);
      }
    S[j] = dedupe_points(pts);
  }
  return S;
}

FormulaResult beta2_cluster(const MomentRequest& req, const ProcessSchedule& sched, int nodes, bool* collided) {
  Beta2Setup g;
  g.N = sched.N();
  g.cs = req.cs;
  const int m = static_cast<int>(g.cs.size());
  for (int i = 0; i < m; ++i) g.groups.push_back(group_steps(sched, req.Ts[i]));

  detail::ClusterProblem p;
  p.nodes_per_circle = nodes;
  n_residues(g.N, g.cs[0], &p.first_points, &p.first_weights);
  for (std::size_t k = 0; k < p.first_points.size(); ++k)
    p.first_weights[k] *= schedule_factor_beta2(g.groups[0], g.cs[0], p.first_points[k]);
  std::vector<std::vector<cplx>> own(m);
  for (int j = 1; j < m; ++j)
    for (int l = 1; l <= g.N; ++l) own[j].emplace_back(-g.cs[j] - l + 1, 0.0);
  p.seeds = shift_seeds(p.first_points, own, g.cs);
  p.excluded.resize(m);
  double reach = 0;
  for (const auto& S : p.seeds)
    for (cplx s : S) reach = std::max(reach, s.real());
  for (int j = 1; j < m; ++j) p.excluded[j] = beta2_exclusions(g.groups[j], reach);
  if (collided) {
    double d = std::numeric_limits<double>::infinity();
    for (int n = 1; n < m; ++n)
      for (cplx s : p.seeds[n])
        for (cplx e : p.excluded[n]) d = std::min(d, std::abs(s - e));
    *collided = d < 1e-8;
    if (*collided) return {};
  }
  p.single = [&](int n, cplx u) { return n_factor(g.N, g.cs[n], u) * schedule_factor_beta2(g.groups[n], g.cs[n], u); };
  p.pair = [&](int i, int j, cplx ui, cplx uj) { return beta2_pair(g.cs, i, j, ui, uj); };
  const auto res = detail::solve_cluster(p);
  double pref = 1;
  for (double c : g.cs) pref /= -c;
  FormulaResult out;
  out.value = assert_real(res.value * pref, 1e-9, "finite_moments_beta2");
  out.error_estimate = res.error_estimate * std::abs(pref);
  return out;
}

FormulaResult beta2_nested(const MomentRequest& req, const FormulaOptions& opt) {
  Beta2Setup g;
  g.N = req.schedule.N();
  g.cs = req.cs;
  const int m = static_cast<int>(g.cs.size());
  for (int i = 0; i < m; ++i) g.groups.push_back(group_steps(req.schedule, req.Ts[i]));
  const ContourFamily fam = nested_contours_beta2(g.cs, g.N, req.schedule, req.Ts);
  auto f = [&](std::span<const cplx> u) {
    cplx v = 1.0;
    for (int j = 0; j < m; ++j) {
      v *= n_factor(g.N, g.cs[j], u[j]) * schedule_factor_beta2(g.groups[j], g.cs[j], u[j]);
      for (int i = 0; i < j; ++i) v *= beta2_pair(g.cs, i, j, u[i], u[j]);
    }
    return v;
  };
  TensorOptions topt = opt.tensor;
  topt.throw_on_failure = true;
  const auto r = integrate_tensor(f, fam, topt);
  double pref = 1;
  for (double c : g.cs) pref /= -c;
  return {assert_real(r.value * pref, opt.realness_tol, "finite_moments_beta2"), r.error_estimate * std::abs(pref), "nested"};
}

template <class Eval>
FormulaResult cluster_with_continuation(const ProcessSchedule& sched, int nodes, Eval&& eval) {
  bool collided = false;
  FormulaResult r = eval(sched, nodes, &collided);
  if (!collided) {
    r.method = "cluster";
    return r;
  }
  r = alpha_continuation(sched, [&](const ProcessSchedule& s) {
    // Shifted schedules sit close to the collision, so the circles need more nodes.
    bool again = false;
    FormulaResult x = eval(s, nodes * 3 / 2, &again);
    if (again) throw ContourInfeasible("alpha continuation: shifted schedule still has a pole collision");
    return x;
  });
  r.method = "cluster+alpha-continuation";
  return r;
}

}  // namespace

double assert_real(cplx z, double tol, const std::string& what) {
  const double scale = std::max(std::abs(z.real()), 1.0);
  if (!(std::abs(z.imag()) <= tol * scale) || !std::isfinite(z.real()))
    throw std::runtime_error(what + ": result is not real (" + std::to_string(z.real()) + " + " +
                             std::to_string(z.imag()) + "i)");
  return z.real();
}

FormulaResult finite_moments_general_beta(const MomentRequest& req, const FormulaOptions& opt) {
  check_times(req.Ts, req.ks.size());
  int K = 0;
  for (int k : req.ks) {
    if (k < 1) throw std::invalid_argument("finite_moments_general_beta: degrees must be positive");
    K += k;
  }
  if (K > 6) throw std::invalid_argument("finite_moments_general_beta: total degree above 6");
  if (opt.method == ContourMethod::kNested) return general_beta_nested(req, opt);
  return cluster_with_continuation(req.schedule, opt.nodes_per_circle, [&](const ProcessSchedule& s, int nodes, bool* collided) {
    return general_beta_cluster(req, s, nodes, collided);
  });
}

FormulaResult finite_moments_beta2(const MomentRequest& req, const FormulaOptions& opt) {
  check_times(req.Ts, req.cs.size());
  for (double c : req.cs)
    if (!(c > 0)) throw std::invalid_argument("finite_moments_beta2: c must be positive");
  if (req.cs.size() > 6) throw std::invalid_argument("finite_moments_beta2: at most 6 variables");
  if (opt.method == ContourMethod::kNested) return beta2_nested(req, opt);
  return cluster_with_continuation(req.schedule, opt.nodes_per_circle, [&](const ProcessSchedule& s, int nodes, bool* collided) {
    return beta2_cluster(req, s, nodes, collided);
  });
}

FormulaResult ginibre_moments_beta2(const std::vector<double>& cs, const std::vector<int>& Ts, int N,
                                    const std::vector<double>& log_rescale, const FormulaOptions& opt) {
  check_times(Ts, cs.size());
  if (N < 1) throw std::invalid_argument("ginibre_moments_beta2: N must be positive");
  for (double c : cs)
    if (!(c > 0)) throw std::invalid_argument("ginibre_moments_beta2: c must be positive");
  const int m = static_cast<int>(cs.size());
  std::vector<double> shift(m, 0.0);
  if (!log_rescale.empty()) {
    if (static_cast<int>(log_rescale.size()) != m) throw std::invalid_argument("ginibre_moments_beta2: one rescale per c");
    shift = log_rescale;
  }
  auto log_gamma_ratio = [](cplx u, double c) { return lgamma_complex(1.0 - u) - lgamma_complex(1.0 - u - c); };

  if (m == 1) {
    // Same-sign residue terms at -c - l0 + 1, summed in the log domain.
    const double c = cs[0];
    double total = 0;
    for (int l0 = 1; l0 <= N; ++l0) {
      const double u0 = -c - l0 + 1;
      double lg = 0;
      int sign = 1;
      for (int l = 1; l <= N; ++l) {
        if (l == l0) continue;
        const double r = (u0 + l - 1) / (u0 + c + l - 1);
        if (r == 0) {
          sign = 0;
          break;
        }
        if (r < 0) sign = -sign;
        lg += std::log(std::abs(r));
      }
      if (sign == 0) continue;
      int s1 = 1, s2 = 1;
      lg += Ts[0] * (lgamma_signed(c + l0, &s1) - lgamma_signed(static_cast<double>(l0), &s2)) - shift[0];
      // The residue carries a factor -c that cancels the prefactor.
      total += sign * std::exp(lg);
    }
    return {total, std::abs(total) * 1e-14 * N, "residues"};
  }

  detail::ClusterProblem p;
  p.nodes_per_circle = opt.nodes_per_circle;
  n_residues(N, cs[0], &p.first_points, &p.first_weights);
  for (std::size_t k = 0; k < p.first_points.size(); ++k)
    p.first_weights[k] *= std::exp(static_cast<double>(Ts[0]) * log_gamma_ratio(p.first_points[k], cs[0]) - shift[0]);
  std::vector<std::vector<cplx>> own(m);
  for (int j = 1; j < m; ++j)
    for (int l = 1; l <= N; ++l) own[j].emplace_back(-cs[j] - l + 1, 0.0);
  p.seeds = shift_seeds(p.first_points, own, cs);
  p.excluded.resize(m);
  double reach = 0;
  for (const auto& S : p.seeds)
    for (cplx s : S) reach = std::max(reach, s.real());
  for (int j = 1; j < m; ++j)
    for (int n = 1; n <= static_cast<int>(std::ceil(reach)) + 2; ++n) p.excluded[j].emplace_back(n, 0.0);
  p.single = [&](int n, cplx u) {
    return n_factor(N, cs[n], u) * std::exp(static_cast<double>(Ts[n]) * log_gamma_ratio(u, cs[n]) - shift[n]);
  };
  p.pair = [&](int i, int j, cplx ui, cplx uj) { return beta2_pair(cs, i, j, ui, uj); };
  const auto res = detail::solve_cluster(p);
  double pref = 1;
  for (double c : cs) pref /= -c;
  return {assert_real(res.value * pref, opt.realness_tol, "ginibre_moments_beta2"), res.error_estimate * std::abs(pref),
          "cluster"};
}

}  // namespace rmtlab
