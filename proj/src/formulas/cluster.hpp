#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "rmtlab/contour.hpp"

namespace rmtlab::detail {

// Variable 0 is integrated exactly by its residues; every later variable runs over a union of small
// circles around its candidate poles with radii growing by `ratio` per variable.
struct ClusterProblem {
  std::vector<cplx> first_points;
  std::vector<cplx> first_weights;  // residues, including the single factor of variable 0
  std::vector<std::vector<cplx>> seeds;     // index n >= 1
  std::vector<std::vector<cplx>> excluded;  // index n >= 1
  std::function<cplx(int, cplx)> single;    // n >= 1
  std::function<cplx(int, int, cplx, cplx)> pair;
  int nodes_per_circle = 32;
  double ratio = 16.0;
  double extra_gap = std::numeric_limits<double>::infinity();
};

// Smallest distance between seeds, or from a seed to an excluded pole, over all variables.
double cluster_gap(const ClusterProblem& p);

PairStructuredResult solve_cluster(const ClusterProblem& p);

}  // namespace rmtlab::detail
