#include <algorithm>
#include <cmath>

#include "cluster.hpp"
#include "rmtlab/formulas.hpp"
#include "rmtlab/special.hpp"

namespace rmtlab {

namespace {

double lattice_gap(double theta, int K) {
  double g = std::numeric_limits<double>::infinity();
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b) {
      const double v = std::abs(a * theta - b);
      if (v > 1e-12) g = std::min(g, v);
    }
  return g;
}

bool is_integer(double c) { return std::abs(c - std::round(c)) < 1e-12; }

// (-1)^k / (k! Gamma(c - k)), the residue of Gamma(-u - c)/Gamma(-u) at u = -c + k up to sign.
double residue_coeff(double c, int k) {
  if (is_integer(c) && k >= std::lround(c)) return 0.0;
  int sign = 1;
  const double lg = lgamma_signed(c - k, &sign);
  const double v = std::exp(-lg - std::lgamma(k + 1.0));
  return ((k % 2) ? -1.0 : 1.0) * sign * v;
}

double laplace_exponent(double c, double T_hat, double u) { return -T_hat * (0.5 * c * (c + 1.0) + c * u); }

// Bound on sum_{k > K} |residue term| for k >= c (uses Gamma(k + 1 - c) <= k!).
double laplace_tail(double c, double T_hat, int K) {
  if (is_integer(c) && K + 1 >= std::lround(c)) return 0.0;
  const double q = std::exp(-T_hat * c);
  return std::exp(-T_hat * c * (1.0 - c) / 2.0) * std::pow(q, K + 1) / ((1.0 - q) * c * M_PI);
}

struct Series {
  double value = 0;
  double tail = 0;
  int terms = 0;
};

Series laplace_series(double c, double T_hat, const LaplaceOptions& opt, int start = 0, double scale = 0.0) {
  Series s;
  const int kmin = static_cast<int>(std::ceil(c));
  for (int k = start; k < opt.max_terms; ++k) {
    s.value += residue_coeff(c, k) * std::exp(laplace_exponent(c, T_hat, -c + k)) / c;
    s.terms = k + 1;
    if (k >= kmin) {
      s.tail = laplace_tail(c, T_hat, k);
      if (s.tail <= opt.rel_tol * std::max(std::abs(s.value), scale)) return s;
    }
  }
  s.tail = laplace_tail(c, T_hat, opt.max_terms - 1);
  if (s.tail > opt.rel_tol * std::max(std::abs(s.value), scale))
    throw QuadratureNonConvergence("interpolating_laplace: tail bound " + std::to_string(s.tail) + " above tolerance at " +
                                   std::to_string(opt.max_terms) + " terms");
  return s;
}

cplx laplace_weight(double c, double T_hat, cplx u) {
  return std::exp(lgamma_complex(-u - c) - lgamma_complex(-u) - T_hat * (0.5 * c * (c + 1.0) + c * u));
}

}  // namespace

FormulaResult local_moment_general_beta(const std::vector<int>& ks, const std::vector<double>& gammas,
                                        const ThetaParam& theta, const FormulaOptions& opt) {
  if (ks.empty() || ks.size() != gammas.size()) throw std::invalid_argument("local_moment_general_beta: ks/gammas mismatch");
  std::vector<int> block;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw std::invalid_argument("local_moment_general_beta: k must be positive");
    if (!(gammas[i] > 0)) throw std::invalid_argument("local_moment_general_beta: gamma must be positive");
    for (int j = 0; j < ks[i]; ++j) block.push_back(static_cast<int>(i));
  }
  const int K = static_cast<int>(block.size());
  if (K > 6) throw std::invalid_argument("local_moment_general_beta: total degree above 6");
  const double th = theta.to_double();

  detail::ClusterProblem p;
  p.nodes_per_circle = opt.nodes_per_circle;
  p.first_points = {cplx(0.0)};
  p.first_weights = {cplx(th)};
  p.seeds.resize(K);
  p.excluded.resize(K);
  for (int n = 1; n < K; ++n) {
    std::vector<cplx> pts;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; a + b <= n; ++b) pts.emplace_back(a * th - b, 0.0);
    p.seeds[n] = dedupe_points(pts);
  }
  p.extra_gap = lattice_gap(th, K + 1);
  p.single = [&](int n, cplx u) { return std::exp(-gammas[block[n]] * u / th) * th / u; };
  p.pair = [&](int a, int b, cplx u, cplx v) {
    const cplx d = v - u;
    if (b == a + 1 && block[a] == block[b]) return -d / ((d + 1.0) * (d - th));
    return d * (d + 1.0 - th) / ((d + 1.0) * (d - th));
  };
  const auto res = detail::solve_cluster(p);
  const double pref = std::pow(th, -static_cast<double>(ks.size()));
  return {assert_real(res.value * pref, opt.realness_tol, "local_moment_general_beta"), res.error_estimate * pref,
          "cluster"};
}

FormulaResult interpolating_laplace(const std::vector<double>& cs, const std::vector<double>& T_hats,
                                    const LaplaceOptions& opt) {
  const int m = static_cast<int>(cs.size());
  if (m == 0 || T_hats.size() != cs.size()) throw std::invalid_argument("interpolating_laplace: cs/T_hats mismatch");
  for (int i = 0; i < m; ++i) {
    if (!(cs[i] > 0)) throw std::invalid_argument("interpolating_laplace: c must be positive");
    if (!(T_hats[i] > 0)) throw std::invalid_argument("interpolating_laplace: T_hat must be positive");
    if (i > 0 && T_hats[i] > T_hats[i - 1]) throw std::invalid_argument("interpolating_laplace: T_hat must be non-increasing");
  }
  if (m == 1) {
    const Series s = laplace_series(cs[0], T_hats[0], opt);
    return {s.value, s.tail, "residue series (" + std::to_string(s.terms) + " terms)"};
  }
  if (m > 2) throw std::invalid_argument("interpolating_laplace: implemented for m <= 2");

  // Truncation depth from the one-variable tail bounds.
  std::vector<int> Kt(m);
  double tail = 0;
  for (int i = 0; i < m; ++i) {
    const Series s = laplace_series(cs[i], T_hats[i], opt);
    Kt[i] = s.terms;
    tail += s.tail / std::max(std::abs(s.value), 1e-300);
  }
  detail::ClusterProblem p;
  p.nodes_per_circle = opt.nodes_per_circle;
  for (int k = 0; k < Kt[0]; ++k) {
    const double u = -cs[0] + k;
    const double w = -residue_coeff(cs[0], k) * std::exp(laplace_exponent(cs[0], T_hats[0], u));
    if (w == 0.0) continue;
    p.first_points.emplace_back(u, 0.0);
    p.first_weights.emplace_back(w, 0.0);
  }
  p.seeds.resize(2);
  p.excluded.resize(2);
  std::vector<cplx> pts;
  for (int k = 0; k < Kt[1]; ++k) pts.emplace_back(-cs[1] + k, 0.0);
  for (cplx s : p.first_points) {
    pts.push_back(s + cs[0]);
    pts.push_back(s - cs[1]);
  }
  p.seeds[1] = dedupe_points(pts);
  for (int k = Kt[1]; k < Kt[1] + 3; ++k) {
    const cplx e(-cs[1] + k, 0.0);
    if (std::none_of(p.seeds[1].begin(), p.seeds[1].end(), [&](cplx s) { return std::abs(s - e) < 1e-9; }))
      p.excluded[1].push_back(e);
  }
  p.single = [&](int n, cplx u) { return laplace_weight(cs[n], T_hats[n], u); };
  p.pair = [&](int i, int j, cplx ui, cplx uj) {
    return (uj - ui) * (uj + cs[j] - ui - cs[i]) / ((uj - ui - cs[i]) * (uj + cs[j] - ui));
  };
  const auto res = detail::solve_cluster(p);
  const double pref = 1.0 / (cs[0] * cs[1]);
  const double v = assert_real(res.value * pref, 1e-9, "interpolating_laplace");
  return {v, res.error_estimate * pref + tail * std::abs(v), "residues + cluster"};
}

FormulaResult interpolating_laplace_quadrature(double c, double T_hat, int K, const TensorOptions& opt) {
  if (!(c > 0) || !(T_hat > 0) || K < 1) throw std::invalid_argument("interpolating_laplace_quadrature: bad arguments");
  ContourFamily fam;
  ContourSpec s;
  s.center = cplx(-c + 0.5 * (K - 1), 0.0);
  s.semi_axis_real = 0.5 * (K - 1) + 0.5;
  s.semi_axis_imag = 1.0;
  fam.specs.push_back(s);
  TensorOptions o = opt;
  o.throw_on_failure = true;
  const auto r = integrate_tensor([&](std::span<const cplx> u) { return laplace_weight(c, T_hat, u[0]) / (-c); }, fam, o);
  LaplaceOptions lo;
  const Series rest = laplace_series(c, T_hat, lo, K, std::abs(r.value));
  const double v = assert_real(r.value, 1e-9, "interpolating_laplace_quadrature") + rest.value;
  return {v, r.error_estimate + rest.tail, "ellipse + series remainder"};
}

}  // namespace rmtlab
