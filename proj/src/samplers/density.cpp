#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rmtlab/samplers.hpp"

namespace rmtlab {

namespace {

int particle_count(int N, const JacobiParams& p) {
  if (p.M >= N) return N;
  if (!p.M_is_integer()) throw std::invalid_argument("jacobi density: M < N must be an integer");
  return static_cast<int>(p.M.get_num().get_si());
}

// Integrates g over [0,1]^n coordinate by coordinate, splitting at the earlier coordinates where |x_i - x_j| kinks.
double integrate_cube(const std::function<double(const std::vector<double>&)>& g, int n, double tol) {
  boost::math::quadrature::tanh_sinh<double> ts(n > 2 ? 6 : 10);
  std::vector<double> x(n);
  std::function<double(int)> level = [&](int k) -> double {
    if (k == n) return g(x);
    std::vector<double> cuts{0.0, 1.0};
    for (int i = 0; i < k; ++i) cuts.push_back(x[i]);
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      if (cuts[s + 1] - cuts[s] <= 0) continue;
      total += ts.integrate(
          [&](double v) {
            x[k] = v;
            return level(k + 1);
          },
          cuts[s], cuts[s + 1], tol);
    }
    return total;
  };
  return level(0);
}

}  // namespace

double jacobi_density(const std::vector<double>& x, int N, const JacobiParams& p, const ThetaParam& theta) {
  const double th = theta.to_double();
  if (!(th * p.alpha_d() > 0)) throw std::invalid_argument("jacobi_density: theta alpha must be positive");
  const int n = particle_count(N, p);
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("jacobi_density: expected min(M, N) coordinates");
  const double a = th * p.alpha_d() - 1.0;
  const double b = th * std::abs(p.M_d() - N) + th - 1.0;
  double v = 1;
  for (int i = 0; i < n; ++i) {
    if (x[i] < 0 || x[i] > 1) return 0.0;
    v *= std::pow(x[i], a) * std::pow(1.0 - x[i], b);
    for (int j = i + 1; j < n; ++j) v *= std::pow(std::abs(x[i] - x[j]), 2.0 * th);
  }
  return v;
}

double jacobi_normalization(int N, const JacobiParams& p, const ThetaParam& theta, double tol) {
  const int n = particle_count(N, p);
  if (n > 3) throw std::invalid_argument("jacobi_normalization: only min(M, N) <= 3");
  return integrate_cube([&](const std::vector<double>& x) { return jacobi_density(x, N, p, theta); }, n, tol);
}

double jacobi_expectation(const std::function<double(const std::vector<double>&)>& f, int N, const JacobiParams& p,
                          const ThetaParam& theta, double tol) {
  const int n = particle_count(N, p);
  if (n > 3) throw std::invalid_argument("jacobi_expectation: only min(M, N) <= 3");
  const double Z = jacobi_normalization(N, p, theta, tol);
  return integrate_cube([&](const std::vector<double>& x) { return f(x) * jacobi_density(x, N, p, theta); }, n, tol) / Z;
}

}  // namespace rmtlab
