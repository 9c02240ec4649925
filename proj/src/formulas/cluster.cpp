#include "cluster.hpp"

#include <algorithm>
#include <cmath>

namespace rmtlab::detail {

double cluster_gap(const ClusterProblem& p) {
  double gap = p.extra_gap;
  for (std::size_t n = 1; n < p.seeds.size(); ++n) {
    gap = std::min(gap, min_pairwise_distance(p.seeds[n]));
    for (cplx s : p.seeds[n])
      for (cplx e : p.excluded[n]) gap = std::min(gap, std::abs(s - e));
  }
  return gap;
}

PairStructuredResult solve_cluster(const ClusterProblem& p) {
  const int d = static_cast<int>(p.seeds.size());
  if (d == 0) throw std::invalid_argument("solve_cluster: no variables");
  PairStructuredProblem prob;
  QuadratureRule first{p.first_points, p.first_weights};
  prob.axes.push_back(first);
  prob.half_axes.push_back(first);
  if (d > 1) {
    const double gap = cluster_gap(p);
    if (!(gap > 1e-9)) throw ContourInfeasible("cluster contours: a required pole coincides with an excluded pole");
    const double r_last = gap / 3.0;
    for (int n = 1; n < d; ++n) {
      // Inner circles only see poles a factor `ratio` closer or farther away and converge faster.
      const int nodes = n + 1 < d ? std::min(16, p.nodes_per_circle) : p.nodes_per_circle;
      ClusterAxis ax{p.seeds[n], r_last / std::pow(p.ratio, d - 1 - n), nodes};
      prob.axes.push_back(ax.rule(false));
      prob.half_axes.push_back(ax.rule(true));
    }
  }
  prob.single = [&](int n, cplx u) { return n == 0 ? cplx(1.0) : p.single(n, u); };
  prob.pair = p.pair;
  return integrate_pair_structured(prob);
}

}  // namespace rmtlab::detail
