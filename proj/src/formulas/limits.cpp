#include <cmath>

#include "rmtlab/formulas.hpp"
#include "rmtlab/special.hpp"

namespace rmtlab {

namespace {

cplx limit_f(const LimitParams& p, int T, cplx v) {
  cplx f = v / (v + 1.0);
  for (int tau = 0; tau < T; ++tau) {
    if (p.M_hat[tau] == 0) continue;
    f *= (v - p.alpha_hat[tau]) / (v - p.alpha_hat[tau] - p.M_hat[tau]);
  }
  return f;
}

// Distance from -1 to the nearest excluded pole alpha_hat + M_hat.
double exclusion_distance(const LimitParams& p, int T) {
  double d = std::numeric_limits<double>::infinity();
  for (int tau = 0; tau < T; ++tau)
    if (p.M_hat[tau] > 0) d = std::min(d, 1.0 + p.alpha_hat[tau] + p.M_hat[tau]);
  return std::isfinite(d) ? d : 2.0;
}

}  // namespace

void LimitParams::validate(int T) const {
  if (alpha_hat.size() != M_hat.size()) throw std::invalid_argument("limit params: alpha_hat and M_hat lengths differ");
  if (T < 1 || T > length())
    throw std::invalid_argument("limit params: need " + std::to_string(T) + " steps, have " + std::to_string(length()));
  for (int i = 0; i < T; ++i)
    if (alpha_hat[i] < 0 || M_hat[i] < 0) throw std::invalid_argument("limit params: alpha_hat, M_hat must be >= 0");
}

FormulaResult limit_shape_moment(int k, const LimitParams& limits, int T, const TensorOptions& opt) {
  if (k < 1) throw std::invalid_argument("limit_shape_moment: k must be positive");
  limits.validate(T);
  ContourFamily fam;
  fam.specs.push_back(ContourSpec::circle(cplx(-1.0, 0.0), 0.5 * exclusion_distance(limits, T)));
  TensorOptions o = opt;
  o.throw_on_failure = true;
  const auto r = integrate_tensor([&](std::span<const cplx> v) { return ipow(limit_f(limits, T, v[0]), k); }, fam, o);
  return {assert_real(-r.value / static_cast<double>(k), 1e-9, "limit_shape_moment"), r.error_estimate / k, "circle"};
}

FormulaResult global_covariance(int k1, int k2, int T1, int T2, const LimitParams& limits, const ThetaParam& theta,
                                const TensorOptions& opt) {
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("global_covariance: k must be positive");
  if (T1 < T2) throw std::invalid_argument("global_covariance: need T1 >= T2");
  limits.validate(T1);
  const double R = std::min(exclusion_distance(limits, T1), exclusion_distance(limits, T2));
  ContourFamily fam;
  fam.specs.push_back(ContourSpec::circle(cplx(-1.0, 0.0), R / 3.0));
  fam.specs.push_back(ContourSpec::circle(cplx(-1.0, 0.0), 2.0 * R / 3.0));
  TensorOptions o = opt;
  o.throw_on_failure = true;
  auto f = [&](std::span<const cplx> v) {
    const cplx d = v[1] - v[0];
    return ipow(limit_f(limits, T1, v[0]), k1) * ipow(limit_f(limits, T2, v[1]), k2) / (d * d);
  };
  const auto r = integrate_tensor(f, fam, o);
  const double th = theta.to_double();
  return {assert_real(r.value / th, 1e-9, "global_covariance"), r.error_estimate / th, "nested circles"};
}

double gamma_schedule(const ProcessSchedule& schedule, int N, double T_hat) {
  if (T_hat < 0) throw std::invalid_argument("gamma_schedule: T_hat must be >= 0");
  const long steps = static_cast<long>(std::floor(T_hat * N));
  if (steps > schedule.length())
    throw std::invalid_argument("gamma_schedule: schedule has " + std::to_string(schedule.length()) + " steps, need " +
                                std::to_string(steps));
  double g = 0;
  for (long tau = 1; tau <= steps; ++tau) {
    const auto& s = schedule.step(static_cast<int>(tau));
    g += 1.0 / (N + s.alpha_d() - 1.0) - 1.0 / (N + s.M_d() + s.alpha_d() - 1.0);
  }
  return g;
}

}  // namespace rmtlab
