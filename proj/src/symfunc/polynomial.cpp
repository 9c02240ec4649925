#include <algorithm>
#include <cmath>
#include <functional>

#include "rmtlab/symfunc.hpp"

namespace rmtlab {

namespace {

// Distinct permutations of lambda padded with zeros to length N.
std::vector<std::vector<int>> orbit(const Partition& lam, int N) {
  std::vector<int> v(N, 0);
  for (int i = 0; i < lam.length(); ++i) v[i] = lam[i];
  std::sort(v.begin(), v.end());
  std::vector<std::vector<int>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

bool weakly_decreasing(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[i - 1]) return false;
  return true;
}

template <class Scalar>
Scalar power(const Scalar& x, int e) {
  Scalar out(1);
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

template <class Scalar>
Scalar eval_impl(const SymmetricPolynomial& f, const std::vector<Scalar>& x) {
  if (static_cast<int>(x.size()) != f.num_vars())
    throw std::invalid_argument("eval_poly: point has wrong number of variables");
  Scalar total(0);
  for (const auto& [lam, c] : f.coeffs()) {
    Scalar m(0);
    for (const auto& alpha : orbit(lam, f.num_vars())) {
      Scalar term(1);
      for (std::size_t i = 0; i < alpha.size(); ++i) term *= power(x[i], alpha[i]);
      m += term;
    }
    if constexpr (std::is_same_v<Scalar, Rational>) {
      total += c * m;
    } else {
      total += to_double(c) * m;
    }
  }
  return total;
}

}  // namespace

SymmetricPolynomial::SymmetricPolynomial(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw std::invalid_argument("SymmetricPolynomial needs at least one variable");
}

SymmetricPolynomial SymmetricPolynomial::monomial(const Partition& lam, int N) {
  SymmetricPolynomial p(N);
  p.add_term(lam, Rational(1));
  return p;
}

SymmetricPolynomial SymmetricPolynomial::power_sum(int k, int N) {
  if (k < 0) throw std::invalid_argument("power_sum: negative degree");
  if (k == 0) return constant(Rational(N), N);
  return monomial(Partition{k}, N);
}

SymmetricPolynomial SymmetricPolynomial::constant(const Rational& c, int N) {
  SymmetricPolynomial p(N);
  p.add_term(Partition{}, c);
  return p;
}

Rational SymmetricPolynomial::coeff(const Partition& lam) const {
  auto it = coeffs_.find(lam);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

bool SymmetricPolynomial::is_homogeneous() const {
  if (coeffs_.empty()) return true;
  const int d = coeffs_.begin()->first.size();
  return std::all_of(coeffs_.begin(), coeffs_.end(), [d](const auto& kv) { return kv.first.size() == d; });
}

int SymmetricPolynomial::degree() const {
  int d = -1;
  for (const auto& kv : coeffs_) d = std::max(d, kv.first.size());
  return d;
}

void SymmetricPolynomial::add_term(const Partition& lam, const Rational& c) {
  if (lam.length() > num_vars_)
    throw std::invalid_argument("monomial " + lam.str() + " has more parts than variables");
  if (c == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(lam, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

SymmetricPolynomial& SymmetricPolynomial::operator+=(const SymmetricPolynomial& other) {
  if (other.num_vars_ != num_vars_) throw std::invalid_argument("variable count mismatch");
  for (const auto& [lam, c] : other.coeffs_) add_term(lam, c);
  return *this;
}

SymmetricPolynomial& SymmetricPolynomial::operator-=(const SymmetricPolynomial& other) {
  if (other.num_vars_ != num_vars_) throw std::invalid_argument("variable count mismatch");
  for (const auto& [lam, c] : other.coeffs_) add_term(lam, -c);
  return *this;
}

SymmetricPolynomial& SymmetricPolynomial::operator*=(const Rational& c) {
  if (c == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& kv : coeffs_) kv.second *= c;
  return *this;
}

SymmetricPolynomial operator*(const SymmetricPolynomial& a, const SymmetricPolynomial& b) {
  if (a.num_vars_ != b.num_vars_) throw std::invalid_argument("variable count mismatch");
  const int N = a.num_vars_;
  SymmetricPolynomial out(N);
  std::map<Partition, std::vector<std::vector<int>>> orbits;
  auto orbit_of = [&](const Partition& p) -> const std::vector<std::vector<int>>& {
    auto it = orbits.find(p);
    if (it == orbits.end()) it = orbits.emplace(p, orbit(p, N)).first;
    return it->second;
  };
  std::vector<int> sum(N);
  for (const auto& [la, ca] : a.coeffs_) {
    // Fix the first factor at its sorted representative; each product monomial x^nu
    // with nu a partition arises from pairs (alpha, beta) with alpha + beta = nu.
    const auto& oa = orbit_of(la);
    for (const auto& [lb, cb] : b.coeffs_) {
      const auto& ob = orbit_of(lb);
      std::map<Partition, long long> counts;
      for (const auto& alpha : oa)
        for (const auto& beta : ob) {
          for (int i = 0; i < N; ++i) sum[i] = alpha[i] + beta[i];
          if (weakly_decreasing(sum)) ++counts[Partition(sum)];
        }
      const Rational cab = ca * cb;
      for (const auto& [nu, n] : counts) out.add_term(nu, cab * Rational(static_cast<long>(n)));
    }
  }
  return out;
}

nlohmann::json SymmetricPolynomial::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [lam, c] : coeffs_) arr.push_back({{"partition", lam.parts()}, {"coeff", to_string(c)}});
  return arr;
}

SymmetricPolynomial SymmetricPolynomial::from_json(const nlohmann::json& j, int num_vars) {
  SymmetricPolynomial p(num_vars);
  for (const auto& term : j) {
    p.add_term(Partition(term.at("partition").get<std::vector<int>>()),
               parse_rational(term.at("coeff").get<std::string>()));
  }
  return p;
}

double eval_poly(const SymmetricPolynomial& f, const std::vector<double>& x) { return eval_impl(f, x); }

Rational eval_poly(const SymmetricPolynomial& f, const std::vector<Rational>& x) { return eval_impl(f, x); }

long long kostka_number(const Partition& lam, const Partition& mu) {
  static std::mutex mutex;
  static std::map<std::pair<Partition, Partition>, long long> memo;
  if (lam.size() != mu.size()) return 0;
  if (mu.length() == 0) return lam.length() == 0 ? 1 : 0;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = memo.find({lam, mu});
    if (it != memo.end()) return it->second;
  }
  // Remove the cells holding the largest letter: a horizontal strip of size mu_last.
  const int k = mu.parts().back();
  Partition rest(std::vector<int>(mu.parts().begin(), mu.parts().end() - 1));
  long long total = 0;
  std::vector<int> nu(lam.length());
  std::function<void(int, int)> rec = [&](int i, int removed) {
    if (i == lam.length()) {
      if (removed == k) total += kostka_number(Partition(nu), rest);
      return;
    }
    const int hi = lam[i];
    const int lo = lam[i + 1];
    for (int v = hi; v >= lo; --v) {
      if (removed + (hi - v) > k) break;
      nu[i] = v;
      rec(i + 1, removed + (hi - v));
    }
  };
  rec(0, 0);
  std::lock_guard<std::mutex> lock(mutex);
  memo.emplace(std::make_pair(lam, mu), total);
  return total;
}

SymmetricPolynomial schur_poly(const Partition& lam, int N) {
  if (lam.length() > N)
    throw std::invalid_argument("schur_poly: " + lam.str() + " has more parts than variables (polynomial is zero)");
  SymmetricPolynomial out(N);
  for (const auto& mu : partitions_of_size(lam.size(), N)) {
    if (!mu.dominated_by(lam)) continue;
    const long long k = kostka_number(lam, mu);
    if (k != 0) out.add_term(mu, Rational(static_cast<long>(k)));
  }
  return out;
}

Rational schur_bialternant(const Partition& lam, const std::vector<Rational>& x) {
  const int n = static_cast<int>(x.size());
  if (lam.length() > n) return Rational(0);
  auto det = [n](std::vector<std::vector<Rational>> a) {
    Rational d(1);
    for (int c = 0; c < n; ++c) {
      int piv = c;
      while (piv < n && a[piv][c] == 0) ++piv;
      if (piv == n) return Rational(0);
      if (piv != c) {
        std::swap(a[piv], a[c]);
        d = -d;
      }
      d *= a[c][c];
      for (int r = c + 1; r < n; ++r) {
        if (a[r][c] == 0) continue;
        const Rational f = a[r][c] / a[c][c];
        for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    return d;
  };
  std::vector<std::vector<Rational>> num(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) num[i][j] = power(x[i], lam[j] + n - 1 - j);
  Rational vander(1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) vander *= x[i] - x[j];
  if (vander == 0) throw std::invalid_argument("schur_bialternant: points must be distinct");
  return det(num) / vander;
}

std::map<Partition, double> schur_values_by_branching(const std::vector<double>& x, int max_size) {
  std::map<Partition, double> cur{{Partition{}, 1.0}};
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::map<Partition, double> next;
    for (const auto& [mu, val] : cur) {
      for (const auto& lam : horizontal_strips_over(mu, static_cast<int>(j) + 1, max_size)) {
        next[lam] += val * std::pow(x[j], lam.size() - mu.size());
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace rmtlab
