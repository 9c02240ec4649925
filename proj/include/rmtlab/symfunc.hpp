#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace rmtlab {

// Exact rational scalar; always kept canonical (reduced, positive denominator).
using Rational = mpq_class;

// Parses "p/q", "p" or a finite decimal such as "1.5"; throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);
  Partition(std::initializer_list<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int length() const { return static_cast<int>(parts_.size()); }
  int size() const { return size_; }
  // Part i (0-based); zero beyond the length.
  int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

  // mu ⊂ this, i.e. mu_i <= lambda_i for all i.
  bool contains(const Partition& mu) const;
  // this/mu is a horizontal strip: lambda_i >= mu_i >= lambda_{i+1}.
  bool is_horizontal_strip_over(const Partition& mu) const;
  // Dominance order this ⊴ other (requires equal sizes to be meaningful).
  bool dominated_by(const Partition& other) const;

  std::string str() const;

  // Lexicographic order on parts.
  friend bool operator==(const Partition& a, const Partition& b) { return a.parts_ == b.parts_; }
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
    return a.parts_ <=> b.parts_;
  }

 private:
  std::vector<int> parts_;
  int size_ = 0;
};

// All partitions of n with at most max_len parts, reverse-lexicographic order.
std::vector<Partition> partitions_of_size(int n, int max_len);

// Partitions with size <= max_size and at most max_len parts, grouped by size.
std::vector<Partition> partitions_up_to(int max_size, int max_len);

// Number of distinct permutations of (lambda, 0^{N-l(lambda)}).
Rational monomial_orbit_size(const Partition& lam, int N);

class ThetaParam {
 public:
  explicit ThetaParam(Rational value);
  explicit ThetaParam(std::string_view text) : ThetaParam(parse_rational(text)) {}
  const Rational& value() const { return value_; }
  double to_double() const { return rmtlab::to_double(value_); }

 private:
  Rational value_;
};

// Symmetric polynomial in N variables over the monomial basis m_lambda.
class SymmetricPolynomial {
 public:
  explicit SymmetricPolynomial(int num_vars);

  static SymmetricPolynomial monomial(const Partition& lam, int N);
  static SymmetricPolynomial power_sum(int k, int N);
  static SymmetricPolynomial constant(const Rational& c, int N);

  int num_vars() const { return num_vars_; }
  const std::map<Partition, Rational>& coeffs() const { return coeffs_; }
  Rational coeff(const Partition& lam) const;
  bool is_zero() const { return coeffs_.empty(); }
  bool is_homogeneous() const;
  // Largest |lambda| among the keys; -1 for the zero polynomial.
  int degree() const;

  void add_term(const Partition& lam, const Rational& c);

  SymmetricPolynomial& operator+=(const SymmetricPolynomial& other);
  SymmetricPolynomial& operator-=(const SymmetricPolynomial& other);
  SymmetricPolynomial& operator*=(const Rational& c);
  friend SymmetricPolynomial operator+(SymmetricPolynomial a, const SymmetricPolynomial& b) {
    return a += b;
  }
  friend SymmetricPolynomial operator-(SymmetricPolynomial a, const SymmetricPolynomial& b) {
    return a -= b;
  }
  friend SymmetricPolynomial operator*(SymmetricPolynomial a, const Rational& c) { return a *= c; }
  friend SymmetricPolynomial operator*(const SymmetricPolynomial& a, const SymmetricPolynomial& b);
  friend bool operator==(const SymmetricPolynomial& a, const SymmetricPolynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.coeffs_ == b.coeffs_;
  }

  // [{"partition": [..], "coeff": "p/q"}, ...]
  nlohmann::json to_json() const;
  static SymmetricPolynomial from_json(const nlohmann::json& j, int num_vars);

 private:
  int num_vars_;
  std::map<Partition, Rational> coeffs_;
};

double eval_poly(const SymmetricPolynomial& f, const std::vector<double>& x);
Rational eval_poly(const SymmetricPolynomial& f, const std::vector<Rational>& x);

// Schur polynomial via Kostka numbers (semistandard tableaux count).
SymmetricPolynomial schur_poly(const Partition& lam, int N);
// Kostka number K_{lambda,mu}.
long long kostka_number(const Partition& lam, const Partition& mu);
// Bialternant det(x_i^{lambda_j+N-j}) / Vandermonde at distinct rational points.
Rational schur_bialternant(const Partition& lam, const std::vector<Rational>& x);

// s_{lam/mu}(b) in a single variable.
template <class Scalar>
Scalar skew_schur_one_var(const Partition& lam, const Partition& mu, const Scalar& b) {
  if (!lam.is_horizontal_strip_over(mu)) return Scalar(0);
  Scalar out(1);
  for (int i = 0; i < lam.size() - mu.size(); ++i) out *= b;
  return out;
}

// Schur values s_lambda(x_1..x_n) for every lambda with |lambda| <= max_size and
// l(lambda) <= n, built by single-variable branching (no cancellation).
std::map<Partition, double> schur_values_by_branching(const std::vector<double>& x, int max_size);

// Horizontal strips lambda over mu with l(lambda) <= max_len and |lambda| <= max_size.
std::vector<Partition> horizontal_strips_over(const Partition& mu, int max_len, int max_size);

// Jack polynomials P_lambda(.; theta) for a fixed rational theta.
class JackEngine {
 public:
  static constexpr int kDegreeCap = 10;

  explicit JackEngine(const ThetaParam& theta);
  // Shared engine per theta value; thread-safe.
  static std::shared_ptr<const JackEngine> shared(const ThetaParam& theta);

  const Rational& theta() const { return theta_; }

  SymmetricPolynomial jack_poly(const Partition& lam, int N) const;
  Rational jack_at_ones(const Partition& lam, int N) const;
  // Normalized Jack J^_lambda = P_lambda / P_lambda(1^N) as a polynomial.
  SymmetricPolynomial jack_normalized_poly(const Partition& lam, int N) const;
  // c with f = sum_lambda c_lambda P_lambda.
  std::map<Partition, Rational> expand_in_jack_basis(const SymmetricPolynomial& f) const;
  // c with f = sum_lambda c_lambda J^_lambda.
  std::map<Partition, Rational> expand_in_normalized_jack_basis(const SymmetricPolynomial& f) const;

  template <class Scalar>
  Scalar jack_normalized_eval(const Partition& lam, const std::vector<Scalar>& x) const;

 private:
  struct DegreeData {
    std::vector<Partition> parts;           // lex-ascending, all partitions of n
    std::map<Partition, std::size_t> index;
    std::vector<std::vector<Rational>> jack;  // jack[i][j]: coeff of m_{parts[j]} in P_{parts[i]}
  };
  const DegreeData& degree_data(int n) const;
  DegreeData build_degree(int n) const;

  Rational theta_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::shared_ptr<const DegreeData>> cache_;
};

template <class Scalar>
Scalar JackEngine::jack_normalized_eval(const Partition& lam, const std::vector<Scalar>& x) const {
  const int N = static_cast<int>(x.size());
  const Rational at_ones = jack_at_ones(lam, N);
  if (at_ones == 0) throw std::logic_error("jack_normalized_eval: P_lambda(1^N) vanished");
  const SymmetricPolynomial p = jack_poly(lam, N);
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return Rational(eval_poly(p, x) / at_ones);
  } else {
    return eval_poly(p, x) / to_double(at_ones);
  }
}

}  // namespace rmtlab
