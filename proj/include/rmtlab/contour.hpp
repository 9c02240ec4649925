#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtlab/schedule.hpp"

namespace rmtlab {

using cplx = std::complex<double>;

// Counterclockwise ellipse center + a cos(phi) + i b sin(phi).
struct ContourSpec {
  cplx center{0.0, 0.0};
  double semi_axis_real = 1.0;
  double semi_axis_imag = 1.0;
  int nodes = 64;

  static ContourSpec circle(cplx center, double radius, int nodes = 64) { return {center, radius, radius, nodes}; }
  void validate() const;
  cplx point(double phi) const;
  // Ellipse level function: < 1 strictly inside, 1 on the curve.
  double level(cplx z) const;
};

struct QuadratureRule {
  std::vector<cplx> points;
  std::vector<cplx> weights;
};

// Trapezoid nodes with weights z'(phi) (2 pi / n) / (2 pi i): sum f(z_j) w_j ~ (1/2 pi i) oint f.
QuadratureRule contour_nodes(const ContourSpec& spec);

struct ContourConstraint {
  enum class Kind {
    kEncloses,  // spec encloses point
    kExcludes,  // spec does not enclose point
    kInsideShifted,  // spec lies inside (specs[other] + shift)
  };
  Kind kind;
  int spec;
  int other = -1;
  cplx value{};  // the point, or the shift
  std::string label;
};

struct ContourFamily {
  std::vector<ContourSpec> specs;
  std::vector<ContourConstraint> constraints;

  // Re-checks every recorded constraint on sampled boundary points with the given margin.
  bool verify(double margin = 1e-9, std::string* failed = nullptr) const;
};

class ContourInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureNonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool check_constraint(const ContourFamily& family, const ContourConstraint& c, double margin = 1e-9);

using TensorIntegrand = std::function<cplx(std::span<const cplx>)>;

struct TensorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  int max_nodes_per_axis = 4096;
  long long max_evaluations = 1LL << 26;
  bool throw_on_failure = false;
};

struct TensorResult {
  cplx value{};
  double error_estimate = 0.0;
  bool converged = false;
  int nodes_per_axis = 0;
  std::vector<double> history;  // |I_n - I_{n/2}| per doubling
};

// Tensor trapezoid over the family, doubling nodes on every axis until the change is below tolerance.
TensorResult integrate_tensor(const TensorIntegrand& f, const ContourFamily& family, const TensorOptions& opt = {});

// Concentric circles around -theta N with radii spaced by more than max(theta, 1), all excluding
// theta (alpha_tau + M_tau - 1) for tau <= T_i of their block.
ContourFamily nested_contours_general_beta(const std::vector<int>& ks, const Rational& theta, int N,
                                           const ProcessSchedule& schedule, const std::vector<int>& Ts,
                                           int nodes = 64);

// Nested ellipses around [-c_i - N + 1, -c_i], each containing the previous ones shifted by +c_i and
// -c_j, all excluding alpha_tau + l - 1.
// padding <= 0 picks it from the gap between the pole segment and the nearest exclusion.
ContourFamily nested_contours_beta2(const std::vector<double>& cs, int N, const ProcessSchedule& schedule,
                                    const std::vector<int>& Ts, int nodes = 64, double padding = 0.0);

// A union of small counterclockwise circles, used as one integration axis.
struct ClusterAxis {
  std::vector<cplx> centers;
  double radius = 0.0;
  int nodes_per_circle = 16;

  // Trapezoid rule; when half is set the weights of the even-indexed sub-rule are returned.
  QuadratureRule rule(bool half = false) const;
};

// Points within tol of each other are merged.
std::vector<cplx> dedupe_points(const std::vector<cplx>& pts, double tol = 1e-12);
double min_pairwise_distance(const std::vector<cplx>& pts);

// Iterated integral of prod_n g_n(u_n) prod_{m<n} h_{mn}(u_m, u_n) with one axis per variable.
// Axis 0 may be a finite point set with explicit weights (residue elimination).
struct PairStructuredProblem {
  std::vector<QuadratureRule> axes;         // full rules
  std::vector<QuadratureRule> half_axes;    // embedded coarse rules (same points, zero weights on odd nodes)
  std::function<cplx(int, cplx)> single;
  std::function<cplx(int, int, cplx, cplx)> pair;
};

struct PairStructuredResult {
  cplx value{};
  double error_estimate = 0.0;
};

PairStructuredResult integrate_pair_structured(const PairStructuredProblem& p);

}  // namespace rmtlab
