#pragma once

#include <string>
#include <vector>

#include "rmtlab/symfunc.hpp"

namespace rmtlab {

// One step of the beta-Jacobi product process.
struct JacobiParams {
  Rational alpha{1};
  Rational M{1};

  double alpha_d() const { return to_double(alpha); }
  double M_d() const { return to_double(M); }
  bool M_is_integer() const { return M.get_den() == 1; }
  friend bool operator==(const JacobiParams& a, const JacobiParams& b) { return a.alpha == b.alpha && a.M == b.M; }
};

class ProcessSchedule {
 public:
  ProcessSchedule(int N, std::vector<JacobiParams> steps);
  // Same (alpha, M) for T_max steps.
  static ProcessSchedule constant(int N, const JacobiParams& step, int T_max);

  int N() const { return N_; }
  int length() const { return static_cast<int>(steps_.size()); }
  // 1-based time index.
  const JacobiParams& step(int tau) const;
  const std::vector<JacobiParams>& steps() const { return steps_; }
  // Every alpha shifted by h (used for analytic continuation in alpha).
  ProcessSchedule shifted_alpha(const Rational& h) const;
  std::string str() const;

 private:
  int N_;
  std::vector<JacobiParams> steps_;
};

}  // namespace rmtlab
