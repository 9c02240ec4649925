#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rmtlab/samplers.hpp"

namespace rmtlab {

using cplx = std::complex<double>;

namespace {

constexpr double kMaxScaleRise = 600.0;

}  // namespace

GradedTriangular::GradedTriangular(int n) : d_(n, 0.0), P_(decltype(P_)::Identity(n, n)) {
  if (n < 1) throw std::invalid_argument("GradedTriangular: size must be positive");
}

void GradedTriangular::left_multiply(const CMatrix& R) {
  const int n = size();
  if (R.rows() != n || R.cols() != n) throw std::invalid_argument("GradedTriangular: factor has the wrong size");
  decltype(P_) out = decltype(P_)::Zero(n, n);
  std::vector<cplx> m(n);
  std::vector<double> step(n, 1.0);  // exp(d_k - d_{k-1})
  for (int k = 1; k < n; ++k) step[k] = std::exp(d_[k] - d_[k - 1]);
  for (int i = 0; i < n; ++i) {
    double big = 0;
    double f = 1.0;
    for (int k = i; k < n; ++k) {
      const double rise = d_[k] - d_[i];
      if (rise > kMaxScaleRise)
        throw std::overflow_error("GradedTriangular: row scales out of order by e^" + std::to_string(rise));
      if (k > i) f = f > 1e-250 && step[k] < 1e250 ? f * step[k] : std::exp(rise);
      m[k] = R(i, k) * f;
      big = std::max(big, std::abs(m[k]));
    }
    double* o = reinterpret_cast<double*>(out.data() + static_cast<std::ptrdiff_t>(i) * n);
    for (int k = i; k < n; ++k) {
      // Terms this far below the largest one cannot change the row in double precision.
      if (std::abs(m[k]) <= 1e-22 * big) continue;
      const double mr = m[k].real(), mi = m[k].imag();
      const double* p = reinterpret_cast<const double*>(P_.data() + static_cast<std::ptrdiff_t>(k) * n);
      for (int j = k; j < n; ++j) {
        const double pr = p[2 * j], pi = p[2 * j + 1];
        o[2 * j] += mr * pr - mi * pi;
        o[2 * j + 1] += mr * pi + mi * pr;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    double nu = out.row(i).norm();
    if (!std::isfinite(nu)) nu = out.row(i).stableNorm();
    if (!(nu > 0) || !std::isfinite(nu)) throw std::overflow_error("GradedTriangular: degenerate row");
    d_[i] += std::log(nu);
    out.row(i) *= 1.0 / nu;
  }
  P_ = std::move(out);
}

std::vector<double> GradedTriangular::log_squared_singular_values() const {
  return graded_log_squared_singular_values(d_, CMatrix(P_));
}

CMatrix GradedTriangular::dense() const {
  CMatrix out = P_;
  for (int i = 0; i < size(); ++i) out.row(i) *= std::exp(d_[i]);
  return out;
}

std::vector<double> graded_log_squared_singular_values(std::vector<double> lambda, CMatrix G_in) {
  const int n = static_cast<int>(G_in.rows());
  const int m = static_cast<int>(G_in.cols());
  if (static_cast<int>(lambda.size()) != n) throw std::invalid_argument("graded svd: scale/row mismatch");
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> G = G_in;
  auto row = [&](int r) { return reinterpret_cast<double*>(G.data() + static_cast<std::ptrdiff_t>(r) * m); };
  auto norm = [&](const double* x) {
    double s = 0;
    for (int k = 0; k < 2 * m; ++k) s += x[k] * x[k];
    return std::sqrt(s);
  };
  for (int i = 0; i < n; ++i) {
    double* x = row(i);
    const double nu = norm(x);
    lambda[i] += std::log(nu);
    for (int k = 0; k < 2 * m; ++k) x[k] /= nu;
  }
  constexpr double tol = 1e-15;
  for (int sweep = 0;; ++sweep) {
    if (sweep == 80) throw std::runtime_error("graded svd: no convergence after 80 sweeps");
    double worst = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        // a carries the larger scale so that rho <= 1.
        const int a = lambda[i] >= lambda[j] ? i : j;
        const int b = a == i ? j : i;
        double* xa = row(a);
        double* xb = row(b);
        // c = conj(g_a) . g_b
        double cr = 0, ci = 0;
        for (int k = 0; k < m; ++k) {
          const double ar = xa[2 * k], ai = xa[2 * k + 1], br = xb[2 * k], bi = xb[2 * k + 1];
          cr += ar * br + ai * bi;
          ci += ar * bi - ai * br;
        }
        const double ac = std::hypot(cr, ci);
        worst = std::max(worst, ac);
        if (ac <= tol) continue;
        // <g_a, g_b> with the first argument linear is conj(c); ph = conj(c) / |c|.
        const double phr = cr / ac, phi = -ci / ac;
        const double rho = std::exp(lambda[b] - lambda[a]);
        const double q = 1.0 - rho * rho;
        const double tt = 2.0 * ac / (q + std::sqrt(q * q + 4.0 * rho * rho * ac * ac));
        const double cs = 1.0 / std::sqrt(1.0 + rho * rho * tt * tt);
        // g_a += rho^2 tt ph g_b,  g_b -= tt conj(ph) g_a (old g_a).
        const double ur = rho * rho * tt * phr, ui = rho * rho * tt * phi;
        const double vr = tt * phr, vi = -tt * phi;
        double sa = 0, sb = 0;
        for (int k = 0; k < m; ++k) {
          const double ar = xa[2 * k], ai = xa[2 * k + 1], br = xb[2 * k], bi = xb[2 * k + 1];
          const double nar = ar + ur * br - ui * bi, nai = ai + ur * bi + ui * br;
          const double nbr = br - (vr * ar - vi * ai), nbi = bi - (vr * ai + vi * ar);
          xa[2 * k] = nar;
          xa[2 * k + 1] = nai;
          xb[2 * k] = nbr;
          xb[2 * k + 1] = nbi;
          sa += nar * nar + nai * nai;
          sb += nbr * nbr + nbi * nbi;
        }
        const double la = std::sqrt(sa), lb = std::sqrt(sb);
        lambda[a] += std::log(cs * la);
        lambda[b] += std::log(cs * lb);
        for (int k = 0; k < 2 * m; ++k) {
          xa[k] /= la;
          xb[k] /= lb;
        }
      }
    if (worst <= tol) break;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = 2.0 * lambda[i];
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace rmtlab
