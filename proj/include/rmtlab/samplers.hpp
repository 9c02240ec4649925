#pragma once

#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rmtlab/schedule.hpp"
#include "rmtlab/symfunc.hpp"

namespace rmtlab {

enum class BetaClass { kReal = 1, kComplex = 2, kQuaternion = 4 };

int beta_value(BetaClass b);
BetaClass beta_class(int beta);
// Complex columns per field entry: 2 for quaternions, 1 otherwise.
inline int field_width(BetaClass b) { return b == BetaClass::kQuaternion ? 2 : 1; }

using Rng = std::mt19937_64;
using CMatrix = Eigen::MatrixXcd;

// Log squared singular values at one time, weakly decreasing.
struct SingularSpectrum {
  std::vector<double> log_values;
  int time_index = 0;
};

// i.i.d. standard Gaussians with E|g|^2 = 1. Quaternions are 2x2 blocks [[a, b], [-conj b, conj a]].
CMatrix sample_ginibre(BetaClass beta, int rows, int cols, Rng& rng);
// QR of a Ginibre sample with R's diagonal made positive.
CMatrix sample_haar(BetaClass beta, int L, Rng& rng);
// Top-left block, in complex entries.
CMatrix truncate(const CMatrix& U, int rows, int cols);

// Raised when the paired singular values of a quaternion matrix split by more than the pairing tolerance.
class PairingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
constexpr double kPairTolerance = 1e-8;

// Sorted log squared singular values; quaternion pairs are checked and merged.
std::vector<double> log_squared_singular_values(const CMatrix& X, BetaClass beta);
std::vector<double> merge_quaternion_pairs(const std::vector<double>& sorted_logs);

// Upper triangular product kept as diag(exp(d)) * P with unit rows of P.
class GradedTriangular {
 public:
  explicit GradedTriangular(int n);
  int size() const { return static_cast<int>(d_.size()); }
  // this <- R * this for upper triangular R.
  void left_multiply(const CMatrix& R);
  // Log squared singular values, decreasing.
  std::vector<double> log_squared_singular_values() const;
  const std::vector<double>& log_scales() const { return d_; }
  CMatrix dense() const;

 private:
  std::vector<double> d_;
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> P_;
};

// Rows e^{lambda_i} g_i with unit g_i; one-sided Jacobi in the log domain. Returns 2 lambda, decreasing.
std::vector<double> graded_log_squared_singular_values(std::vector<double> lambda, CMatrix G);

// Upper triangular R with X = Q R for some Q with orthonormal columns (rows >= cols).
CMatrix r_factor(const CMatrix& X);

// Y_T = X_T ... X_1 with X_t the (N + alpha_t - 1) x N truncation of Haar U(M_t + N + alpha_t - 1).
// alpha_t must be a positive integer and M_t a nonnegative integer. Spectra at `times` (all when empty).
std::vector<SingularSpectrum> product_squared_singular_values(const ProcessSchedule& schedule, BetaClass beta,
                                                              int T_max, Rng& rng, const std::vector<int>& times = {});

// X_t is the N_t x N_{t-1} truncation of Haar U(L_t); Ns = (N_0, ..., N_T), Ls = (L_1, ..., L_T).
std::vector<SingularSpectrum> rectangular_product_squared_singular_values(const std::vector<int>& Ls,
                                                                          const std::vector<int>& Ns, BetaClass beta,
                                                                          Rng& rng);
// Square schedule with the same law: alpha_t = N_t - N_0 + 1, M_t = L_t - N_t.
ProcessSchedule equivalent_square_schedule(const std::vector<int>& Ls, const std::vector<int>& Ns);

// Products of N x N Ginibre matrices through Bartlett-sampled triangular factors.
std::vector<SingularSpectrum> ginibre_product_squared_singular_values(BetaClass beta, int N, int T_max, Rng& rng,
                                                                      const std::vector<int>& times = {});

// Spectra of X_t ... X_1 for given factors (X_1 first), t = 1..T. The stable path carries X_t ... X_1 = Q R with
// R graded; the naive path multiplies densely and calls a dense SVD.
std::vector<SingularSpectrum> product_spectra_from_factors(const std::vector<CMatrix>& factors, BetaClass beta,
                                                           bool naive = false);

// One step from the identity (T = 1) through Wishart factors: returns (P_1, P_2) of the spectrum.
// beta in {1, 2}; alpha >= 1 and M >= 0 integers.
std::pair<double, double> jacobi_power_sums_one_step(BetaClass beta, int N, int alpha, int M, Rng& rng);

// prod_{i<j} |x_i - x_j|^{2 theta} prod x_i^{theta alpha - 1} (1 - x_i)^{theta |M - N| + theta - 1}, n = min(M, N).
double jacobi_density(const std::vector<double>& x, int N, const JacobiParams& params, const ThetaParam& theta);
// Integral of the density over [0,1]^n, n <= 3.
double jacobi_normalization(int N, const JacobiParams& params, const ThetaParam& theta, double tol = 1e-10);
// E f(x) under the normalized density, n <= 3. f sees the n nontrivial particles.
double jacobi_expectation(const std::function<double(const std::vector<double>&)>& f, int N,
                          const JacobiParams& params, const ThetaParam& theta, double tol = 1e-10);

// time_index,i,log_sq_sv
void write_spectra_csv(std::ostream& os, const std::vector<SingularSpectrum>& spectra, bool header = true);

}  // namespace rmtlab
