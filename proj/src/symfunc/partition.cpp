#include "rmtlab/symfunc.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace rmtlab {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const std::string original(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw std::invalid_argument("not a rational: '" + original + "'");
    mpz_class d(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator: '" + original + "'");
    out = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
      throw std::invalid_argument("not a rational: '" + original + "'");
    mpz_class w(whole.empty() ? std::string("0") : std::string(whole), 10);
    mpz_class f(frac.empty() ? std::string("0") : std::string(frac), 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    out = Rational(w * scale + f, scale);
  } else {
    if (!all_digits(s)) throw std::invalid_argument("not a rational: '" + original + "'");
    out = Rational(mpz_class(std::string(s), 10));
  }
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

std::string to_string(const Rational& r) { return r.get_str(); }

double to_double(const Rational& r) { return r.get_d(); }

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw std::invalid_argument("partition has a negative part");
    if (i > 0 && parts_[i] > parts_[i - 1]) throw std::invalid_argument("partition parts must be weakly decreasing");
  }
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (int p : parts_) size_ += p;
}

Partition::Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

bool Partition::contains(const Partition& mu) const {
  if (mu.length() > length()) return false;
  for (int i = 0; i < mu.length(); ++i)
    if (mu.parts_[i] > parts_[i]) return false;
  return true;
}

bool Partition::is_horizontal_strip_over(const Partition& mu) const {
  if (mu.length() > length()) return false;
  for (int i = 0; i < length(); ++i) {
    const int m = mu[i];
    if (parts_[i] < m) return false;
    if (m < (*this)[i + 1]) return false;
  }
  return true;
}

bool Partition::dominated_by(const Partition& other) const {
  int a = 0, b = 0;
  const int n = std::max(length(), other.length());
  for (int i = 0; i < n; ++i) {
    a += (*this)[i];
    b += other[i];
    if (a > b) return false;
  }
  return true;
}

std::string Partition::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
  os << ')';
  return os.str();
}

std::vector<Partition> partitions_of_size(int n, int max_len) {
  if (n < 0) throw std::invalid_argument("partitions_of_size: n < 0");
  std::vector<Partition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int remaining, int cap) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) == max_len) return;
    for (int p = std::min(remaining, cap); p >= 1; --p) {
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

std::vector<Partition> partitions_up_to(int max_size, int max_len) {
  std::vector<Partition> out;
  for (int n = 0; n <= max_size; ++n) {
    auto level = partitions_of_size(n, max_len);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Rational monomial_orbit_size(const Partition& lam, int N) {
  if (lam.length() > N) return Rational(0);
  mpz_class num, den = 1, f;
  mpz_fac_ui(num.get_mpz_t(), N);
  mpz_fac_ui(f.get_mpz_t(), N - lam.length());
  den *= f;
  const auto& p = lam.parts();
  for (std::size_t i = 0; i < p.size();) {
    std::size_t j = i;
    while (j < p.size() && p[j] == p[i]) ++j;
    mpz_fac_ui(f.get_mpz_t(), j - i);
    den *= f;
    i = j;
  }
  Rational out(num, den);
  out.canonicalize();
  return out;
}

ThetaParam::ThetaParam(Rational value) : value_(std::move(value)) {
  value_.canonicalize();
  if (value_ <= 0) throw std::invalid_argument("theta must be positive, got " + value_.get_str());
}

std::vector<Partition> horizontal_strips_over(const Partition& mu, int max_len, int max_size) {
  std::vector<Partition> out;
  if (mu.length() > max_len || mu.size() > max_size) return out;
  const int len = std::min(max_len, mu.length() + 1);
  const int budget = max_size - mu.size();
  std::vector<int> cur(len, 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == len) {
      out.emplace_back(cur);
      return;
    }
    const int lo = mu[i];
    int hi = lo + (budget - used);
    if (i > 0) hi = std::min(hi, mu[i - 1]);
    for (int v = lo; v <= hi; ++v) {
      cur[i] = v;
      rec(i + 1, used + v - lo);
    }
  };
  rec(0, 0);
  return out;
}

}  // namespace rmtlab
