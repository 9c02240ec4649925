#include "rmtlab/special.hpp"

#include <array>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace rmtlab {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

}  // namespace

cplx lgamma_complex(cplx z) {
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(M_PI) - std::log(std::sin(M_PI * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

double lgamma_signed(double x, int* sign) { return boost::math::lgamma(x, sign); }

double rgamma(double x) {
  if (x <= 0 && x == std::floor(x)) return 0.0;
  int sign = 1;
  const double lg = boost::math::lgamma(x, &sign);
  return sign * std::exp(-lg);
}

cplx ipow(cplx z, long n) {
  if (n < 0) return 1.0 / ipow(z, -n);
  cplx out = 1.0;
  while (n) {
    if (n & 1) out *= z;
    z *= z;
    n >>= 1;
  }
  return out;
}

}  // namespace rmtlab
