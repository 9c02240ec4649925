#include "rmtlab/jack_oracle.hpp"

#include <stdexcept>

namespace rmtlab {

namespace {

Rational rising(const Rational& x, int k) {
  Rational out(1);
  for (int i = 0; i < k; ++i) out *= x + i;
  return out;
}

SymmetricPolynomial to_poly(const JackCoeffState& s, const JackEngine& eng, int N) {
  SymmetricPolynomial f(N);
  for (const auto& [kappa, c] : s.coeffs) {
    if (c == 0) continue;
    f += eng.jack_normalized_poly(kappa, N) * c;
  }
  return f;
}

JackCoeffState from_poly(const SymmetricPolynomial& f, const JackEngine& eng) {
  JackCoeffState s;
  for (auto& [kappa, c] : eng.expand_in_normalized_jack_basis(f))
    if (c != 0) s.coeffs.emplace(kappa, c);
  return s;
}

}  // namespace

Rational h_ratio(const HRatioRequest& req) {
  if (req.N < 1 || req.M < 1) throw std::invalid_argument("h_ratio: N and M must be positive");
  if (req.kappa.length() > req.N) throw std::invalid_argument("h_ratio: l(kappa) > N");
  if (req.alpha <= 0) throw std::invalid_argument("h_ratio: alpha must be positive");
  const Rational& th = req.theta.value();
  Rational out(1);
  for (int i = 1; i <= req.N; ++i) {
    const int k = req.kappa[i - 1];
    if (k == 0) continue;
    for (int j = 1; j <= req.M; ++j) {
      const Rational s = th * (req.N - i + req.M - j + req.alpha);
      if (s <= 0) throw std::domain_error("h_ratio: nonpositive s_ij");
      out *= rising(s, k) / rising(th + s, k);
    }
  }
  return out;
}

JackCoeffState step_expectation(const JackCoeffState& state, const JacobiParams& step, int N, const ThetaParam& theta) {
  if (!step.M_is_integer()) throw std::invalid_argument("step_expectation: M must be an integer");
  const int M = static_cast<int>(step.M.get_num().get_si());
  JackCoeffState out;
  for (const auto& [kappa, c] : state.coeffs) {
    if (M == 0) {
      out.coeffs.emplace(kappa, c);
      continue;
    }
    out.coeffs.emplace(kappa, c * h_ratio({kappa, N, M, step.alpha, theta}));
  }
  return out;
}

Rational exact_joint_moment(const std::vector<int>& ks, const std::vector<int>& Ts, const ProcessSchedule& schedule,
                            const ThetaParam& theta) {
  const std::size_t m = ks.size();
  if (m == 0 || Ts.size() != m) throw std::invalid_argument("exact_joint_moment: ks/Ts mismatch");
  int degree = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (ks[i] < 1) throw std::invalid_argument("exact_joint_moment: k must be positive");
    if (Ts[i] < 1 || (i > 0 && Ts[i] > Ts[i - 1]))
      throw std::invalid_argument("exact_joint_moment: times must be positive and non-increasing");
    degree += ks[i];
  }
  if (degree > JackEngine::kDegreeCap)
    throw std::invalid_argument("exact_joint_moment: total degree " + std::to_string(degree) + " above cap " +
                                std::to_string(JackEngine::kDegreeCap));
  if (Ts[0] > schedule.length()) throw std::invalid_argument("exact_joint_moment: schedule too short");
  const int N = schedule.N();
  const auto eng = JackEngine::shared(theta);

  JackCoeffState s = from_poly(SymmetricPolynomial::power_sum(ks[0], N), *eng);
  for (std::size_t i = 1; i < m; ++i) {
    for (int tau = Ts[i - 1]; tau > Ts[i]; --tau) s = step_expectation(s, schedule.step(tau), N, theta);
    s = from_poly(to_poly(s, *eng, N) * SymmetricPolynomial::power_sum(ks[i], N), *eng);
  }
  for (int tau = Ts[m - 1]; tau >= 1; --tau) s = step_expectation(s, schedule.step(tau), N, theta);
  Rational out(0);
  for (const auto& [kappa, c] : s.coeffs) out += c;
  return out;
}

nlohmann::json joint_moment_fixture(const std::vector<int>& ks, const std::vector<int>& Ts,
                                    const ProcessSchedule& schedule, const ThetaParam& theta) {
  nlohmann::json steps = nlohmann::json::array();
  for (int tau = 1; tau <= Ts.at(0); ++tau) {
    const auto& s = schedule.step(tau);
    steps.push_back({{"alpha", to_string(s.alpha)}, {"M", to_string(s.M)}});
  }
  return {{"ks", ks},
          {"Ts", Ts},
          {"N", schedule.N()},
          {"theta", to_string(theta.value())},
          {"schedule", steps},
          {"value", to_string(exact_joint_moment(ks, Ts, schedule, theta))}};
}

}  // namespace rmtlab
