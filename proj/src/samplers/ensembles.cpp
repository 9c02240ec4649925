#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "rmtlab/samplers.hpp"

namespace rmtlab {

using cplx = std::complex<double>;

int beta_value(BetaClass b) { return static_cast<int>(b); }

BetaClass beta_class(int beta) {
  switch (beta) {
    case 1: return BetaClass::kReal;
    case 2: return BetaClass::kComplex;
    case 4: return BetaClass::kQuaternion;
  }
  throw std::invalid_argument("beta must be 1, 2 or 4, got " + std::to_string(beta));
}

CMatrix sample_ginibre(BetaClass beta, int rows, int cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_ginibre: sizes must be positive");
  boost::random::normal_distribution<double> nd;
  const double s = std::sqrt(0.5);
  switch (beta) {
    case BetaClass::kReal: {
      CMatrix G(rows, cols);
      for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) G(i, j) = nd(rng);
      return G;
    }
    case BetaClass::kComplex: {
      CMatrix G(rows, cols);
      for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) G(i, j) = cplx(nd(rng), nd(rng)) * s;
      return G;
    }
    case BetaClass::kQuaternion: {
      CMatrix G(2 * rows, 2 * cols);
      for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
          const cplx a = cplx(nd(rng), nd(rng)) * (0.5);
          const cplx b = cplx(nd(rng), nd(rng)) * (0.5);
          G(2 * i, 2 * j) = a;
          G(2 * i, 2 * j + 1) = b;
          G(2 * i + 1, 2 * j) = -std::conj(b);
          G(2 * i + 1, 2 * j + 1) = std::conj(a);
        }
      return G;
    }
  }
  throw std::logic_error("sample_ginibre: unknown beta class");
}

CMatrix sample_haar(BetaClass beta, int L, Rng& rng) {
  if (L < 1) throw std::invalid_argument("sample_haar: L must be positive");
  const CMatrix G = sample_ginibre(beta, L, L, rng);
  Eigen::HouseholderQR<CMatrix> qr(G);
  CMatrix Q = qr.householderQ();
  const auto& R = qr.matrixQR();
  for (int j = 0; j < Q.cols(); ++j) {
    const cplx r = R(j, j);
    const double a = std::abs(r);
    if (a > 0) Q.col(j) *= r / a;
  }
  return Q;
}

CMatrix truncate(const CMatrix& U, int rows, int cols) {
  if (rows < 1 || cols < 1 || rows > U.rows() || cols > U.cols())
    throw std::invalid_argument("truncate: requested " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " block of a " + std::to_string(U.rows()) + "x" + std::to_string(U.cols()) + " matrix");
  return U.topLeftCorner(rows, cols);
}

CMatrix r_factor(const CMatrix& X) {
  if (X.rows() < X.cols()) throw std::invalid_argument("r_factor: need rows >= cols");
  Eigen::HouseholderQR<CMatrix> qr(X);
  const int n = static_cast<int>(X.cols());
  return qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
}

std::vector<double> merge_quaternion_pairs(const std::vector<double>& v) {
  if (v.size() % 2) throw PairingViolation("quaternion spectrum has odd length");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); k += 2) {
    const double a = v[k], b = v[k + 1];
    const double gap = std::abs(a - b);
    if (gap > kPairTolerance && std::abs(std::exp(a) - std::exp(b)) > 1e-12)
      throw PairingViolation("quaternion singular values not paired: " + std::to_string(a) + " vs " + std::to_string(b));
    out.push_back(0.5 * (a + b));
  }
  return out;
}

std::vector<double> log_squared_singular_values(const CMatrix& X, BetaClass beta) {
  Eigen::JacobiSVD<CMatrix> svd(X);
  std::vector<double> out;
  for (int i = 0; i < svd.singularValues().size(); ++i) out.push_back(2.0 * std::log(svd.singularValues()(i)));
  std::sort(out.begin(), out.end(), std::greater<>());
  return beta == BetaClass::kQuaternion ? merge_quaternion_pairs(out) : out;
}

}  // namespace rmtlab
