#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rmtlab/jack_oracle.hpp"

namespace rmtlab {

namespace {

void validate(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& ts,
              const std::vector<int>& ns) {
  if (a.empty() || b.empty()) throw std::invalid_argument("schur process: a and b must be nonempty");
  for (double x : a)
    if (!(x > 0)) throw std::invalid_argument("schur process: a must be positive");
  for (double x : b)
    if (!(x > 0)) throw std::invalid_argument("schur process: b must be positive");
  if (ts.empty() || ts.size() != ns.size()) throw std::invalid_argument("schur process: ts/ns mismatch");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0)) throw std::invalid_argument("schur process: t must be positive");
    if (ns[i] < 1 || ns[i] > static_cast<int>(b.size()) || (i > 0 && ns[i] > ns[i - 1]))
      throw std::invalid_argument("schur process: need M >= n_1 >= ... >= n_m >= 1");
  }
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// sum_{n > K} h_n(w): exact up to L from the generating function, then a geometric bound.
double complete_tail(const std::vector<double>& w, int K) {
  const int d = static_cast<int>(w.size());
  const double wmax = max_of(w);
  const int L = std::max(4 * K, K + 400);
  std::vector<double> h(L + 1, 0.0);
  h[0] = 1.0;
  for (double x : w)
    for (int n = 1; n <= L; ++n) h[n] += x * h[n - 1];
  double tail = 0;
  for (int n = K + 1; n <= L; ++n) tail += h[n];
  // h_n <= C(n + d - 1, d - 1) wmax^n and the ratio of consecutive bounds is (n + d)/(n + 1) wmax.
  double term = std::exp(std::lgamma(L + d + 1.0) - std::lgamma(d) - std::lgamma(L + 2.0) + (L + 1) * std::log(wmax));
  const double r = (L + 1.0 + d) / (L + 2.0) * wmax;
  if (r >= 1) throw std::invalid_argument("schur process: tail bound diverges");
  return tail + term / (1.0 - r);
}

}  // namespace

double schur_pt(const Partition& lam, double t) {
  if (!(t > 0)) throw std::invalid_argument("schur_pt: t must be positive");
  const int n = lam.length();
  double s = 0;
  for (int i = 1; i <= n; ++i) s += std::pow(t, lam[i - 1] - i + 1);
  return (1.0 - 1.0 / t) * s + std::pow(t, -n);
}

SchurProcessResult schur_process_bruteforce(const std::vector<double>& a, const std::vector<double>& b,
                                            const std::vector<double>& ts, const std::vector<int>& ns, int K) {
  validate(a, b, ts, ns);
  if (K < 1) throw std::invalid_argument("schur_process_bruteforce: K must be positive");
  const int N = static_cast<int>(a.size());
  const int M = static_cast<int>(b.size());
  std::vector<double> z;
  for (double x : a)
    for (double y : b) z.push_back(x * y);
  if (max_of(z) > 0.5) throw std::invalid_argument("schur_process_bruteforce: need max a_i b_j <= 1/2");

  std::map<Partition, double> level{{Partition{}, 1.0}};
  for (int j = 1; j <= M; ++j) {
    std::map<Partition, double> next;
    for (const auto& [mu, w] : level)
      for (const Partition& lam : horizontal_strips_over(mu, std::min(j, N), K))
        next[lam] += w * skew_schur_one_var(lam, mu, b[j - 1]);
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (ns[i] == j)
        for (auto& [lam, w] : next) w *= schur_pt(lam, ts[i]);
    level = std::move(next);
  }
  const auto sa = schur_values_by_branching(a, K);
  double value = 0;
  for (const auto& [lam, w] : level) {
    const auto it = sa.find(lam);
    if (it != sa.end()) value += w * it->second;
  }
  double norm = 1;
  for (double x : z) norm *= 1.0 - x;

  // |p_t(lambda)| <= 2 t^{|lambda|} for t >= 1 and <= 2 t^{-l(lambda)} for t < 1.
  double tau = 1, pref = norm;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    pref *= 2.0;
    if (ts[i] >= 1)
      tau *= ts[i];
    else
      pref *= std::pow(ts[i], -std::min(N, ns[i]));
  }
  std::vector<double> tz = z;
  for (double& x : tz) x *= tau;
  if (max_of(tz) >= 1) throw std::invalid_argument("schur_process_bruteforce: prod_{t>=1} t * max a_i b_j must be < 1");
  return {value * norm, pref * complete_tail(tz, K)};
}

TensorResult schur_process_quadrature(const std::vector<double>& a, const std::vector<double>& b,
                                      const std::vector<double>& ts, const std::vector<int>& ns,
                                      const TensorOptions& opt) {
  validate(a, b, ts, ns);
  const int m = static_cast<int>(ts.size());
  const double amax = max_of(a);
  std::vector<double> ceiling(m);
  for (int i = 0; i < m; ++i) ceiling[i] = 1.0 / *std::max_element(b.begin(), b.begin() + ns[i]);

  auto radii = [&](double g) {
    std::vector<double> r(m);
    for (int j = 0; j < m; ++j) {
      double need = ts[j] * amax;
      for (int i = 0; i < j; ++i) need = std::max(need, r[i] * std::max(ts[j], 1.0 / ts[i]));
      r[j] = g * need;
    }
    return r;
  };
  auto slack = [&](double g) {
    const auto r = radii(g);
    double s = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) s = std::min(s, ceiling[i] / r[i]);
    return s;
  };
  // Largest g with slack(g) >= g, so the inner and outer margins match.
  if (slack(1.0) <= 1.0 + 1e-6) throw ContourInfeasible("schur_process_quadrature: no nested circles fit below 1/b");
  double lo = 1.0, hi = 2.0;
  while (slack(hi) > hi) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slack(mid) > mid ? lo : hi) = mid;
  }
  const auto r = radii(lo);

  ContourFamily fam;
  for (int i = 0; i < m; ++i) fam.specs.push_back(ContourSpec::circle(cplx(0.0), r[i], 32));
  auto f = [&](std::span<const cplx> z) {
    cplx out(1.0);
    for (int i = 0; i < m; ++i) {
      const cplx zi = z[i];
      for (int j = i + 1; j < m; ++j) {
        const cplx zj = z[j];
        out *= (zj - zi) * (ts[i] * zj - ts[j] * zi) / ((ts[i] * zj - zi) * (zj - ts[j] * zi));
      }
      for (double al : a) out *= (zi - al) / (zi - ts[i] * al);
      for (int l = 0; l < ns[i]; ++l) out *= (1.0 - b[l] * zi / ts[i]) / (1.0 - b[l] * zi);
      out /= zi;
    }
    return out;
  };
  return integrate_tensor(f, fam, opt);
}

}  // namespace rmtlab
