#pragma once

#include <map>
#include <vector>

#include <json.hpp>

#include "rmtlab/contour.hpp"
#include "rmtlab/schedule.hpp"
#include "rmtlab/symfunc.hpp"

namespace rmtlab {

struct HRatioRequest {
  Partition kappa;
  int N = 1;
  int M = 1;
  Rational alpha{1};
  ThetaParam theta{Rational(1)};
};

// prod_{i<=N, j<=M} (s_ij)_{kappa_i} / (theta + s_ij)_{kappa_i},  s_ij = theta (N - i + M - j + alpha).
Rational h_ratio(const HRatioRequest& req);

// Expansion of a statistic in the normalized Jack basis at fixed N and theta.
struct JackCoeffState {
  std::map<Partition, Rational> coeffs;
};

// One transition in expectation: c_kappa -> c_kappa * h_ratio(kappa, step). M must be an integer.
JackCoeffState step_expectation(const JackCoeffState& state, const JacobiParams& step, int N, const ThetaParam& theta);

// E[prod_i p_{k_i}(y^(T_i))] with T_1 >= ... >= T_m, exact.
Rational exact_joint_moment(const std::vector<int>& ks, const std::vector<int>& Ts, const ProcessSchedule& schedule,
                            const ThetaParam& theta);

struct SchurProcessResult {
  double value = 0.0;
  double tail_bound = 0.0;
};

// p_t(lambda) = (1 - 1/t) sum_{i<=n} t^{lambda_i - i + 1} + t^{-n}, any n >= l(lambda).
double schur_pt(const Partition& lam, double t);

// E[prod p_{t_i}(lambda^{n_i})] under the ascending Schur process with specializations a (top) and b (levels),
// summed over chains with |lambda^M| <= K.
SchurProcessResult schur_process_bruteforce(const std::vector<double>& a, const std::vector<double>& b,
                                            const std::vector<double>& ts, const std::vector<int>& ns, int K = 30);

// Same expectation from the m-fold contour integral over nested circles around the origin.
TensorResult schur_process_quadrature(const std::vector<double>& a, const std::vector<double>& b,
                                      const std::vector<double>& ts, const std::vector<int>& ns,
                                      const TensorOptions& opt = {});

// {"ks":[..], "Ts":[..], "N":.., "theta":"p/q", "schedule":[{"alpha":..,"M":..}], "value":"p/q"}
nlohmann::json joint_moment_fixture(const std::vector<int>& ks, const std::vector<int>& Ts,
                                    const ProcessSchedule& schedule, const ThetaParam& theta);

}  // namespace rmtlab
