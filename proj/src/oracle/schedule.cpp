#include "rmtlab/schedule.hpp"

#include <sstream>

namespace rmtlab {

ProcessSchedule::ProcessSchedule(int N, std::vector<JacobiParams> steps) : N_(N), steps_(std::move(steps)) {
  if (N_ < 1) throw std::invalid_argument("schedule: N must be positive");
  if (steps_.empty()) throw std::invalid_argument("schedule: no steps");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].alpha <= 0) throw std::invalid_argument("schedule: alpha must be positive at step " + std::to_string(i + 1));
    if (steps_[i].M < 0) throw std::invalid_argument("schedule: M must be nonnegative at step " + std::to_string(i + 1));
  }
}

ProcessSchedule ProcessSchedule::constant(int N, const JacobiParams& step, int T_max) {
  if (T_max < 1) throw std::invalid_argument("schedule: T_max must be positive");
  return ProcessSchedule(N, std::vector<JacobiParams>(T_max, step));
}

const JacobiParams& ProcessSchedule::step(int tau) const {
  if (tau < 1 || tau > length())
    throw std::out_of_range("schedule has " + std::to_string(length()) + " steps, asked for step " + std::to_string(tau));
  return steps_[tau - 1];
}

ProcessSchedule ProcessSchedule::shifted_alpha(const Rational& h) const {
  auto s = steps_;
  for (auto& p : s) p.alpha += h;
  return ProcessSchedule(N_, std::move(s));
}

std::string ProcessSchedule::str() const {
  std::ostringstream os;
  os << "N=" << N_ << " steps=[";
  for (std::size_t i = 0; i < steps_.size(); ++i)
    os << (i ? "," : "") << "(" << to_string(steps_[i].alpha) << "," << to_string(steps_[i].M) << ")";
  os << "]";
  return os.str();
}

}  // namespace rmtlab
