#pragma once

#include <complex>

namespace rmtlab {

using cplx = std::complex<double>;

// log Gamma(z) on the principal sheet away from the poles (Lanczos g=7, reflection for Re z < 1/2).
// Only exp(lgamma) and differences taken modulo 2*pi*i are meaningful to callers.
cplx lgamma_complex(cplx z);

// log|Gamma(x)| and sign of Gamma(x) for real x that is not a pole.
double lgamma_signed(double x, int* sign);

// 1/Gamma(x) for real x; exactly zero at the poles.
double rgamma(double x);

// z^n by repeated squaring.
cplx ipow(cplx z, long n);

}  // namespace rmtlab
