#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "rmtlab/samplers.hpp"

namespace rmtlab {

using cplx = std::complex<double>;

namespace {

int integer_of(const Rational& r, const char* what) {
  if (r.get_den() != 1) throw std::invalid_argument(std::string("matrix model needs integer ") + what);
  return static_cast<int>(r.get_num().get_si());
}

bool wanted(const std::vector<int>& times, int t) {
  return times.empty() || std::find(times.begin(), times.end(), t) != times.end();
}

SingularSpectrum spectrum_of(const GradedTriangular& Y, BetaClass beta, int t) {
  auto v = Y.log_squared_singular_values();
  if (beta == BetaClass::kQuaternion) v = merge_quaternion_pairs(v);
  return {std::move(v), t};
}

// R factor of an n x p Gaussian matrix (n rows, E|g|^2 = 1), min(n, p) x p; beta in {1, 2}.
template <class Matrix>
Matrix bartlett(BetaClass beta, int n, int p, Rng& rng) {
  using Scalar = typename Matrix::Scalar;
  boost::random::normal_distribution<double> nd;
  const int r = std::min(n, p);
  Matrix R = Matrix::Zero(r, p);
  for (int i = 0; i < r; ++i) {
    const int dof = n - i;
    if (beta == BetaClass::kReal) {
      boost::random::gamma_distribution<double> g(0.5 * dof, 2.0);
      R(i, i) = std::sqrt(g(rng));
      for (int j = i + 1; j < p; ++j) R(i, j) = Scalar(nd(rng));
    } else {
      boost::random::gamma_distribution<double> g(dof, 1.0);
      R(i, i) = std::sqrt(g(rng));
      if constexpr (std::is_same_v<Scalar, cplx>) {
        for (int j = i + 1; j < p; ++j) R(i, j) = cplx(nd(rng), nd(rng)) * std::sqrt(0.5);
      } else {
        throw std::logic_error("bartlett: complex entries in a real matrix");
      }
    }
  }
  return R;
}

template <class Matrix>
std::pair<double, double> power_sums_one_step(BetaClass beta, int N, int alpha, int M, Rng& rng) {
  const Matrix RA = bartlett<Matrix>(beta, N + alpha - 1, N, rng);
  Matrix C = RA.adjoint().template triangularView<Eigen::Lower>() * RA;
  if (M > 0) {
    const Matrix RB = bartlett<Matrix>(beta, M, N, rng);
    if (M >= N)
      C.noalias() += RB.adjoint().template triangularView<Eigen::Lower>() * RB;
    else
      C.noalias() += RB.adjoint() * RB;
  }
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() != Eigen::Success) throw std::runtime_error("jacobi_power_sums_one_step: Cholesky failed");
  // Spectrum of C^{-1} A is that of W W^* with W = L^{-1} R_A^*.
  const Matrix W = llt.matrixL().solve(Matrix(RA.adjoint()));
  const double p1 = W.squaredNorm();
  // W is lower triangular.
  const Matrix G = W.adjoint().template triangularView<Eigen::Upper>() * W;
  const double p2 = G.squaredNorm();
  return {p1, p2};
}

}  // namespace

std::vector<SingularSpectrum> product_squared_singular_values(const ProcessSchedule& schedule, BetaClass beta,
                                                              int T_max, Rng& rng, const std::vector<int>& times) {
  if (T_max < 1 || T_max > schedule.length())
    throw std::invalid_argument("product_squared_singular_values: T_max outside the schedule");
  const int N = schedule.N();
  const int w = field_width(beta);
  GradedTriangular Y(w * N);
  std::vector<SingularSpectrum> out;
  for (int t = 1; t <= T_max; ++t) {
    const auto& st = schedule.step(t);
    const int alpha = integer_of(st.alpha, "alpha");
    const int M = integer_of(st.M, "M");
    if (alpha < 1 || M < 0) throw std::invalid_argument("product_squared_singular_values: need alpha >= 1, M >= 0");
    const int rows = N + alpha - 1;
    // Right invariance of the truncation lets the left orthogonal factor of Y_{t-1} be dropped.
    const CMatrix X = truncate(sample_haar(beta, M + rows, rng), w * rows, w * N);
    Y.left_multiply(r_factor(X));
    if (wanted(times, t)) out.push_back(spectrum_of(Y, beta, t));
  }
  return out;
}

std::vector<SingularSpectrum> product_spectra_from_factors(const std::vector<CMatrix>& factors, BetaClass beta,
                                                           bool naive) {
  if (factors.empty()) throw std::invalid_argument("product_spectra_from_factors: no factors");
  const int n = static_cast<int>(factors[0].cols());
  std::vector<SingularSpectrum> out;
  if (naive) {
    CMatrix Y = CMatrix::Identity(n, n);
    for (std::size_t t = 0; t < factors.size(); ++t) {
      Y = factors[t] * Y;
      out.push_back({log_squared_singular_values(Y, beta), static_cast<int>(t) + 1});
    }
    return out;
  }
  CMatrix Q = CMatrix::Identity(n, n);
  GradedTriangular Y(n);
  for (std::size_t t = 0; t < factors.size(); ++t) {
    if (factors[t].cols() != Q.rows()) throw std::invalid_argument("product_spectra_from_factors: size mismatch");
    const CMatrix Z = factors[t] * Q;
    if (Z.rows() < n) throw std::invalid_argument("product_spectra_from_factors: product rank would drop below N");
    Eigen::HouseholderQR<CMatrix> qr(Z);
    Q = qr.householderQ() * CMatrix::Identity(Z.rows(), n);
    Y.left_multiply(qr.matrixQR().topRows(n).triangularView<Eigen::Upper>());
    out.push_back(spectrum_of(Y, beta, static_cast<int>(t) + 1));
  }
  return out;
}

std::vector<SingularSpectrum> rectangular_product_squared_singular_values(const std::vector<int>& Ls,
                                                                          const std::vector<int>& Ns, BetaClass beta,
                                                                          Rng& rng) {
  if (Ls.empty() || Ns.size() != Ls.size() + 1)
    throw std::invalid_argument("rectangular product: need Ns = (N_0, ..., N_T) and Ls = (L_1, ..., L_T)");
  const int N = Ns[0];
  for (std::size_t t = 1; t < Ns.size(); ++t) {
    if (Ns[t] < N) throw std::invalid_argument("rectangular product: need N_0 <= N_t");
    if (std::max(Ns[t - 1], Ns[t]) > Ls[t - 1]) throw std::invalid_argument("rectangular product: need max(N_{t-1}, N_t) <= L_t");
  }
  if (std::all_of(Ns.begin(), Ns.end(), [&](int n) { return n == N; }))
    return product_squared_singular_values(equivalent_square_schedule(Ls, Ns), beta, static_cast<int>(Ls.size()), rng);
  const int w = field_width(beta);
  std::vector<CMatrix> factors;
  for (std::size_t t = 1; t < Ns.size(); ++t)
    factors.push_back(truncate(sample_haar(beta, Ls[t - 1], rng), w * Ns[t], w * Ns[t - 1]));
  return product_spectra_from_factors(factors, beta);
}

ProcessSchedule equivalent_square_schedule(const std::vector<int>& Ls, const std::vector<int>& Ns) {
  if (Ls.empty() || Ns.size() != Ls.size() + 1) throw std::invalid_argument("equivalent_square_schedule: size mismatch");
  std::vector<JacobiParams> steps;
  for (std::size_t t = 1; t < Ns.size(); ++t)
    steps.push_back({Rational(Ns[t] - Ns[0] + 1), Rational(Ls[t - 1] - Ns[t])});
  return ProcessSchedule(Ns[0], steps);
}

std::vector<SingularSpectrum> ginibre_product_squared_singular_values(BetaClass beta, int N, int T_max, Rng& rng,
                                                                      const std::vector<int>& times) {
  if (N < 1 || T_max < 1) throw std::invalid_argument("ginibre product: N and T_max must be positive");
  const int w = field_width(beta);
  GradedTriangular Y(w * N);
  std::vector<SingularSpectrum> out;
  for (int t = 1; t <= T_max; ++t) {
    if (beta == BetaClass::kQuaternion)
      Y.left_multiply(r_factor(sample_ginibre(beta, N, N, rng)));
    else
      Y.left_multiply(bartlett<CMatrix>(beta, N, N, rng));
    if (wanted(times, t)) out.push_back(spectrum_of(Y, beta, t));
  }
  return out;
}

std::pair<double, double> jacobi_power_sums_one_step(BetaClass beta, int N, int alpha, int M, Rng& rng) {
  if (N < 1 || alpha < 1 || M < 0) throw std::invalid_argument("jacobi_power_sums_one_step: need N, alpha >= 1, M >= 0");
  if (beta == BetaClass::kReal) return power_sums_one_step<Eigen::MatrixXd>(beta, N, alpha, M, rng);
  if (beta == BetaClass::kComplex) return power_sums_one_step<CMatrix>(beta, N, alpha, M, rng);
  throw std::invalid_argument("jacobi_power_sums_one_step: beta must be 1 or 2");
}

void write_spectra_csv(std::ostream& os, const std::vector<SingularSpectrum>& spectra, bool header) {
  if (header) os << "time_index,i,log_sq_sv\n";
  const auto old = os.precision(17);
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < s.log_values.size(); ++i) os << s.time_index << ',' << i + 1 << ',' << s.log_values[i] << '\n';
  os.precision(old);
}

}  // namespace rmtlab
