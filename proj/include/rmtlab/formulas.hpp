#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmtlab/contour.hpp"
#include "rmtlab/schedule.hpp"
#include "rmtlab/symfunc.hpp"

namespace rmtlab {

struct FormulaResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::string method;
};

// Ordered observation times T_1 >= ... >= T_m with integer degrees k_i (general beta) or real c_i (beta = 2).
struct MomentRequest {
  std::vector<int> Ts;
  std::vector<int> ks;
  std::vector<double> cs;
  ThetaParam theta{Rational(1)};
  ProcessSchedule schedule;

  MomentRequest(ProcessSchedule s) : schedule(std::move(s)) {}
};

enum class ContourMethod {
  kCluster,  // residue for the innermost variable, unions of small circles for the rest
  kNested,   // the nested contour family with tensor trapezoid quadrature
};

struct FormulaOptions {
  ContourMethod method = ContourMethod::kCluster;
  int nodes_per_circle = 32;
  TensorOptions tensor{};
  double realness_tol = 1e-9;
};

// Imaginary parts above tol * |Re| (or above tol when Re vanishes) throw std::runtime_error.
double assert_real(cplx z, double tol, const std::string& what);

FormulaResult finite_moments_general_beta(const MomentRequest& req, const FormulaOptions& opt = {});
FormulaResult finite_moments_beta2(const MomentRequest& req, const FormulaOptions& opt = {});

// Squared singular values of products of N x N complex Ginibre matrices. Variable i is multiplied by
// exp(-log_rescale[i]) inside the integral; c_i (T_i + 1) log N gives the edge normalization.
FormulaResult ginibre_moments_beta2(const std::vector<double>& cs, const std::vector<int>& Ts, int N,
                                    const std::vector<double>& log_rescale = {}, const FormulaOptions& opt = {});

struct LimitParams {
  std::vector<double> alpha_hat;
  std::vector<double> M_hat;

  int length() const { return static_cast<int>(alpha_hat.size()); }
  void validate(int T) const;
};

FormulaResult limit_shape_moment(int k, const LimitParams& limits, int T, const TensorOptions& opt = {});
FormulaResult global_covariance(int k1, int k2, int T1, int T2, const LimitParams& limits, const ThetaParam& theta,
                                const TensorOptions& opt = {});

FormulaResult local_moment_general_beta(const std::vector<int>& ks, const std::vector<double>& gammas,
                                        const ThetaParam& theta, const FormulaOptions& opt = {});

struct LaplaceOptions {
  int max_terms = 4000;
  double rel_tol = 1e-13;
  int nodes_per_circle = 32;
};

// Joint Laplace transform of the interpolating process, m <= 2.
FormulaResult interpolating_laplace(const std::vector<double>& cs, const std::vector<double>& T_hats,
                                    const LaplaceOptions& opt = {});

// m = 1 by trapezoid quadrature on an ellipse around the first K poles plus the series remainder.
FormulaResult interpolating_laplace_quadrature(double c, double T_hat, int K, const TensorOptions& opt = {});

double gamma_schedule(const ProcessSchedule& schedule, int N, double T_hat);

}  // namespace rmtlab
