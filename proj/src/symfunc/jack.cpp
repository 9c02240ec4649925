#include <algorithm>

#include "rmtlab/symfunc.hpp"

namespace rmtlab {

namespace {

using Coeffs = std::map<Partition, Rational>;

// p_k * sum c_mu m_mu in the full ring of symmetric functions.
Coeffs multiply_by_power_sum(const Coeffs& f, int k) {
  Coeffs out;
  for (const auto& [mu, c] : f) {
    std::vector<Partition> targets;
    const auto& p = mu.parts();
    for (std::size_t i = 0; i <= p.size(); ++i) {
      if (i > 0 && i < p.size() && p[i] == p[i - 1]) continue;
      std::vector<int> v = p;
      if (i == p.size()) {
        v.push_back(k);
      } else {
        v[i] += k;
      }
      std::sort(v.rbegin(), v.rend());
      targets.emplace_back(v);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (const auto& nu : targets) {
      // Coefficient of x^nu in p_k m_mu: positions i with nu - k e_i a permutation of mu.
      long long count = 0;
      for (int i = 0; i < nu.length(); ++i) {
        if (nu[i] < k) continue;
        std::vector<int> w = nu.parts();
        w[i] -= k;
        std::sort(w.rbegin(), w.rend());
        if (Partition(w) == mu) ++count;
      }
      if (count) out[nu] += c * Rational(static_cast<long>(count));
    }
  }
  return out;
}

Rational z_lambda(const Partition& rho) {
  mpz_class z = 1, f;
  const auto& p = rho.parts();
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), p[i], j - i);
    mpz_fac_ui(f.get_mpz_t(), j - i);
    z *= pw * f;
    i = j;
  }
  return Rational(z);
}

std::vector<std::vector<Rational>> invert(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw std::logic_error("singular transition matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const Rational d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

}  // namespace

JackEngine::JackEngine(const ThetaParam& theta) : theta_(theta.value()) {}

std::shared_ptr<const JackEngine> JackEngine::shared(const ThetaParam& theta) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const JackEngine>> engines;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = engines[to_string(theta.value())];
  if (!slot) slot = std::make_shared<const JackEngine>(theta);
  return slot;
}

JackEngine::DegreeData JackEngine::build_degree(int n) const {
  DegreeData d;
  d.parts = partitions_of_size(n, n);
  std::reverse(d.parts.begin(), d.parts.end());
  const std::size_t np = d.parts.size();
  for (std::size_t i = 0; i < np; ++i) d.index[d.parts[i]] = i;

  // R[rho][lambda]: coefficient of m_lambda in p_rho.
  std::vector<std::vector<Rational>> R(np, std::vector<Rational>(np));
  for (std::size_t r = 0; r < np; ++r) {
    Coeffs f{{Partition{}, Rational(1)}};
    for (int part : d.parts[r].parts()) f = multiply_by_power_sum(f, part);
    for (const auto& [lam, c] : f) R[r][d.index.at(lam)] = c;
  }
  // p = R m, so m_lambda = sum_rho Rinv[lambda][rho] p_rho.
  const auto Rinv = invert(R);

  std::vector<Rational> weight(np);  // <p_rho, p_rho>
  for (std::size_t r = 0; r < np; ++r) {
    Rational tpow(1);
    for (int i = 0; i < d.parts[r].length(); ++i) tpow /= theta_;
    weight[r] = z_lambda(d.parts[r]) * tpow;
  }
  std::vector<std::vector<Rational>> gram(np, std::vector<Rational>(np));
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = a; b < np; ++b) {
      Rational s(0);
      for (std::size_t r = 0; r < np; ++r)
        if (Rinv[a][r] != 0 && Rinv[b][r] != 0) s += Rinv[a][r] * Rinv[b][r] * weight[r];
      gram[a][b] = s;
      gram[b][a] = s;
    }

  // Gram-Schmidt along lex-ascending order (a linear extension of dominance).
  d.jack.assign(np, std::vector<Rational>(np));
  std::vector<std::vector<Rational>> gp(np);  // gp[j][k] = <m_k, P_j>
  std::vector<Rational> norm(np);
  for (std::size_t i = 0; i < np; ++i) {
    std::vector<Rational> v(np);
    v[i] = 1;
    for (std::size_t j = 0; j < i; ++j) {
      if (gp[j][i] == 0) continue;
      const Rational f = gp[j][i] / norm[j];
      for (std::size_t k = 0; k <= j; ++k)
        if (d.jack[j][k] != 0) v[k] -= f * d.jack[j][k];
    }
    d.jack[i] = v;
    gp[i].assign(np, Rational(0));
    for (std::size_t k = 0; k < np; ++k) {
      Rational s(0);
      for (std::size_t l = 0; l <= i; ++l)
        if (v[l] != 0) s += v[l] * gram[k][l];
      gp[i][k] = s;
    }
    Rational nn(0);
    for (std::size_t k = 0; k <= i; ++k)
      if (v[k] != 0) nn += v[k] * gp[i][k];
    norm[i] = nn;
  }
  return d;
}

const JackEngine::DegreeData& JackEngine::degree_data(int n) const {
  if (n > kDegreeCap)
    throw std::domain_error("Jack degree " + std::to_string(n) + " exceeds cap " + std::to_string(kDegreeCap));
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(n);
  if (it == cache_.end()) it = cache_.emplace(n, std::make_shared<const DegreeData>(build_degree(n))).first;
  return *it->second;
}

SymmetricPolynomial JackEngine::jack_poly(const Partition& lam, int N) const {
  if (lam.length() > N)
    throw std::invalid_argument("jack_poly: " + lam.str() + " has more parts than variables");
  const DegreeData& d = degree_data(lam.size());
  const std::size_t i = d.index.at(lam);
  SymmetricPolynomial out(N);
  for (std::size_t k = 0; k <= i; ++k)
    if (d.jack[i][k] != 0 && d.parts[k].length() <= N) out.add_term(d.parts[k], d.jack[i][k]);
  return out;
}

Rational JackEngine::jack_at_ones(const Partition& lam, int N) const {
  Rational s(0);
  const SymmetricPolynomial P = jack_poly(lam, N);
  for (const auto& [mu, c] : P.coeffs()) s += c * monomial_orbit_size(mu, N);
  return s;
}

SymmetricPolynomial JackEngine::jack_normalized_poly(const Partition& lam, int N) const {
  return jack_poly(lam, N) * Rational(1 / jack_at_ones(lam, N));
}

std::map<Partition, Rational> JackEngine::expand_in_jack_basis(const SymmetricPolynomial& f) const {
  const int N = f.num_vars();
  Coeffs rest = f.coeffs();
  Coeffs out;
  while (!rest.empty()) {
    // Largest key of the highest degree present.
    auto top = std::max_element(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
      if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
      return a.first < b.first;
    });
    const Partition lam = top->first;
    const Rational c = top->second;
    out[lam] = c;
    const SymmetricPolynomial P = jack_poly(lam, N);
    for (const auto& [mu, pc] : P.coeffs()) {
      auto& slot = rest[mu];
      slot -= c * pc;
      if (slot == 0) rest.erase(mu);
    }
  }
  return out;
}

std::map<Partition, Rational> JackEngine::expand_in_normalized_jack_basis(const SymmetricPolynomial& f) const {
  auto out = expand_in_jack_basis(f);
  for (auto& [lam, c] : out) c *= jack_at_ones(lam, f.num_vars());
  return out;
}

}  // namespace rmtlab
