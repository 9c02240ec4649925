#include "rmtlab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rmtlab {

namespace {

constexpr int kBoundarySamples = 256;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string fmt(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real();
  if (z.imag() != 0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

// Strictly inside with an absolute margin measured along the ellipse's smaller axis.
bool inside(const ContourSpec& s, cplx z, double margin) {
  const double lvl = std::sqrt(s.level(z));
  return lvl < 1.0 - margin / std::min(s.semi_axis_real, s.semi_axis_imag);
}

bool outside(const ContourSpec& s, cplx z, double margin) {
  const double lvl = std::sqrt(s.level(z));
  return lvl > 1.0 + margin / std::min(s.semi_axis_real, s.semi_axis_imag);
}

}  // namespace

void ContourSpec::validate() const {
  if (!(semi_axis_real > 0) || !(semi_axis_imag > 0)) throw std::invalid_argument("contour: semi-axes must be positive");
  if (nodes < 16 || (nodes & (nodes - 1)) != 0) throw std::invalid_argument("contour: nodes must be a power of two >= 16");
}

cplx ContourSpec::point(double phi) const {
  return center + cplx(semi_axis_real * std::cos(phi), semi_axis_imag * std::sin(phi));
}

double ContourSpec::level(cplx z) const {
  const cplx d = z - center;
  const double x = d.real() / semi_axis_real, y = d.imag() / semi_axis_imag;
  return x * x + y * y;
}

QuadratureRule contour_nodes(const ContourSpec& spec) {
  spec.validate();
  QuadratureRule r;
  r.points.resize(spec.nodes);
  r.weights.resize(spec.nodes);
  const double h = 2.0 * M_PI / spec.nodes;
  for (int j = 0; j < spec.nodes; ++j) {
    const double phi = h * j;
    r.points[j] = spec.point(phi);
    const cplx dz(-spec.semi_axis_real * std::sin(phi), spec.semi_axis_imag * std::cos(phi));
    // dz * h / (2 pi i)
    r.weights[j] = dz * h / cplx(0.0, 2.0 * M_PI);
  }
  return r;
}

bool check_constraint(const ContourFamily& family, const ContourConstraint& c, double margin) {
  const ContourSpec& s = family.specs.at(c.spec);
  switch (c.kind) {
    case ContourConstraint::Kind::kEncloses:
      return inside(s, c.value, margin);
    case ContourConstraint::Kind::kExcludes:
      return outside(s, c.value, margin);
    case ContourConstraint::Kind::kInsideShifted: {
      ContourSpec shifted = family.specs.at(c.other);
      shifted.center += c.value;
      for (int j = 0; j < kBoundarySamples; ++j)
        if (!inside(shifted, s.point(2.0 * M_PI * j / kBoundarySamples), margin)) return false;
      return true;
    }
  }
  return false;
}

bool ContourFamily::verify(double margin, std::string* failed) const {
  for (const auto& c : constraints) {
    if (!check_constraint(*this, c, margin)) {
      if (failed) *failed = c.label;
      return false;
    }
  }
  return true;
}

TensorResult integrate_tensor(const TensorIntegrand& f, const ContourFamily& family, const TensorOptions& opt) {
  const std::size_t d = family.specs.size();
  if (d == 0 || d > 6) throw std::invalid_argument("integrate_tensor: dimension must be 1..6");
  TensorResult res;
  int n = family.specs[0].nodes;
  for (const auto& s : family.specs) {
    s.validate();
    n = std::max(n, s.nodes);
  }
  auto evaluate = [&](int nodes) {
    std::vector<QuadratureRule> rules;
    for (auto s : family.specs) {
      s.nodes = nodes;
      rules.push_back(contour_nodes(s));
    }
    std::vector<int> idx(d, 0);
    std::vector<cplx> z(d);
    cplx sum = 0.0;
    while (true) {
      cplx w = 1.0;
      for (std::size_t a = 0; a < d; ++a) {
        z[a] = rules[a].points[idx[a]];
        w *= rules[a].weights[idx[a]];
      }
      sum += w * f(std::span<const cplx>(z.data(), d));
      std::size_t a = 0;
      while (a < d && ++idx[a] == nodes) idx[a++] = 0;
      if (a == d) break;
    }
    return sum;
  };
  auto cost = [d](int nodes) { return static_cast<long double>(std::pow(static_cast<long double>(nodes), d)); };

  cplx prev = evaluate(n);
  res.nodes_per_axis = n;
  res.value = prev;
  res.error_estimate = std::numeric_limits<double>::infinity();
  while (2 * n <= opt.max_nodes_per_axis && cost(2 * n) <= opt.max_evaluations) {
    n *= 2;
    const cplx cur = evaluate(n);
    const double change = std::abs(cur - prev);
    res.history.push_back(change);
    res.value = cur;
    res.nodes_per_axis = n;
    res.error_estimate = change;
    if (change <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur))) {
      res.converged = true;
      break;
    }
    prev = cur;
  }
  if (!res.converged && opt.throw_on_failure)
    throw QuadratureNonConvergence("integrate_tensor: relative change " + fmt(res.error_estimate / std::abs(res.value)) +
                                   " above tolerance at " + std::to_string(res.nodes_per_axis) + " nodes per axis");
  return res;
}

ContourFamily nested_contours_general_beta(const std::vector<int>& ks, const Rational& theta, int N,
                                           const ProcessSchedule& schedule, const std::vector<int>& Ts, int nodes) {
  if (ks.size() != Ts.size() || ks.empty()) throw std::invalid_argument("nested_contours_general_beta: ks/Ts mismatch");
  const double th = to_double(theta);
  const cplx center(-th * N, 0.0);
  const double gap = std::max(th, 1.0);

  std::vector<int> block;
  for (std::size_t i = 0; i < ks.size(); ++i)
    for (int j = 0; j < ks[i]; ++j) block.push_back(static_cast<int>(i));
  const int K = static_cast<int>(block.size());

  std::vector<std::vector<double>> excl(K);
  double h = std::numeric_limits<double>::infinity();
  int binding = 0;
  for (int n = 0; n < K; ++n) {
    double D = std::numeric_limits<double>::infinity();
    for (int tau = 1; tau <= Ts[block[n]]; ++tau) {
      const auto& st = schedule.step(tau);
      const double x = th * (st.alpha_d() + st.M_d() - 1.0);
      excl[n].push_back(x);
      D = std::min(D, std::abs(x - center.real()));
    }
    if (D / (n + 1) < h) {
      h = D / (n + 1);
      binding = n;
    }
  }
  if (!(h > gap * (1.0 + 1e-9)))
    throw ContourInfeasible("nested_contours_general_beta: " + std::to_string(K) + " circles spaced by more than " +
                            fmt(gap) + " around " + fmt(center) + " cannot exclude " + fmt(excl[binding].front()) +
                            " (radius budget " + fmt(h * (binding + 1)) + " for circle " + std::to_string(binding + 1) + ")");

  ContourFamily fam;
  for (int n = 0; n < K; ++n) {
    fam.specs.push_back(ContourSpec::circle(center, (n + 0.5) * h, nodes));
    fam.constraints.push_back({ContourConstraint::Kind::kEncloses, n, -1, center,
                               "circle " + std::to_string(n + 1) + " encloses " + fmt(center)});
    for (double x : excl[n])
      fam.constraints.push_back({ContourConstraint::Kind::kExcludes, n, -1, cplx(x, 0.0),
                                 "circle " + std::to_string(n + 1) + " excludes " + fmt(x)});
  }
  for (int n = 0; n < K; ++n)
    for (int m = n + 1; m < K; ++m) {
      fam.constraints.push_back({ContourConstraint::Kind::kInsideShifted, n, m, cplx(-th, 0.0),
                                 "circle " + std::to_string(n + 1) + " inside circle " + std::to_string(m + 1) + " - theta"});
      fam.constraints.push_back({ContourConstraint::Kind::kInsideShifted, n, m, cplx(1.0, 0.0),
                                 "circle " + std::to_string(n + 1) + " inside circle " + std::to_string(m + 1) + " + 1"});
    }
  std::string failed;
  if (!fam.verify(1e-9, &failed)) throw ContourInfeasible("nested_contours_general_beta: constraint failed: " + failed);
  return fam;
}

ContourFamily nested_contours_beta2(const std::vector<double>& cs, int N, const ProcessSchedule& schedule,
                                    const std::vector<int>& Ts, int nodes, double padding) {
  const int m = static_cast<int>(cs.size());
  if (m == 0 || Ts.size() != cs.size()) throw std::invalid_argument("nested_contours_beta2: cs/Ts mismatch");
  for (double c : cs)
    if (!(c > 0)) throw std::invalid_argument("nested_contours_beta2: c must be positive");

  std::vector<std::vector<double>> excl(m);
  double x_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int tau = 1; tau <= Ts[i]; ++tau) {
      const auto& st = schedule.step(tau);
      excl[i].push_back(st.alpha_d());
      for (int l = 2; l <= static_cast<int>(std::ceil(st.M_d())); ++l) excl[i].push_back(st.alpha_d() + l - 1);
    }
    x_min = std::min(x_min, *std::min_element(excl[i].begin(), excl[i].end()));
  }
  const double right_most = -*std::min_element(cs.begin(), cs.end());
  if (padding <= 0) padding = std::min(0.5, (x_min - right_most) / (4.0 * m));

  ContourFamily fam;
  for (int j = 0; j < m; ++j) {
    std::vector<cplx> req;
    for (int l = 1; l <= N; ++l) req.emplace_back(-cs[j] - l + 1, 0.0);
    for (int i = 0; i < j; ++i)
      for (int s = 0; s < kBoundarySamples; ++s) {
        const cplx z = fam.specs[i].point(2.0 * M_PI * s / kBoundarySamples);
        req.push_back(z + cs[i]);
        req.push_back(z - cs[j]);
      }
    double lo = req[0].real(), hi = lo, top = 0;
    for (auto z : req) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
      top = std::max(top, std::abs(z.imag()));
    }
    ContourSpec s;
    s.nodes = nodes;
    s.center = cplx(0.5 * (lo + hi), 0.0);
    s.semi_axis_imag = top + padding;
    // Smallest real semi-axis containing every required point, then pad.
    double a_lo = 0.5 * (hi - lo), a_hi = a_lo + 2 * padding + 1.0;
    auto contains_all = [&](double a) {
      ContourSpec t = s;
      t.semi_axis_real = a;
      return std::all_of(req.begin(), req.end(), [&](cplx z) { return t.level(z) < 1.0; });
    };
    while (!contains_all(a_hi)) a_hi *= 2;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a_lo + a_hi);
      (contains_all(mid) ? a_hi : a_lo) = mid;
    }
    s.semi_axis_real = a_hi + padding;
    fam.specs.push_back(s);
    for (int l = 1; l <= N; ++l)
      fam.constraints.push_back({ContourConstraint::Kind::kEncloses, j, -1, cplx(-cs[j] - l + 1, 0.0),
                                 "ellipse " + std::to_string(j + 1) + " encloses " + fmt(-cs[j] - l + 1)});
    for (double x : excl[j])
      fam.constraints.push_back({ContourConstraint::Kind::kExcludes, j, -1, cplx(x, 0.0),
                                 "ellipse " + std::to_string(j + 1) + " excludes " + fmt(x)});
    for (int i = 0; i < j; ++i) {
      fam.constraints.push_back({ContourConstraint::Kind::kInsideShifted, i, j, cplx(-cs[i], 0.0),
                                 "ellipse " + std::to_string(i + 1) + " inside ellipse " + std::to_string(j + 1) + " - c_" +
                                     std::to_string(i + 1)});
      fam.constraints.push_back({ContourConstraint::Kind::kInsideShifted, i, j, cplx(cs[j], 0.0),
                                 "ellipse " + std::to_string(i + 1) + " inside ellipse " + std::to_string(j + 1) + " + c_" +
                                     std::to_string(j + 1)});
    }
  }
  std::string failed;
  if (!fam.verify(1e-9, &failed)) throw ContourInfeasible("nested_contours_beta2: constraint failed: " + failed);
  return fam;
}

QuadratureRule ClusterAxis::rule(bool half) const {
  QuadratureRule r;
  const int n = nodes_per_circle;
  const double h = 2.0 * M_PI / n;
  for (cplx c : centers)
    for (int j = 0; j < n; ++j) {
      const cplx e = std::polar(1.0, h * j);
      r.points.push_back(c + radius * e);
      // d(c + r e^{i phi}) = i r e^{i phi} dphi, divided by 2 pi i
      cplx w = radius * e / static_cast<double>(n);
      if (half) w = (j % 2 == 0) ? 2.0 * w : cplx(0.0);
      r.weights.push_back(w);
    }
  return r;
}

std::vector<cplx> dedupe_points(const std::vector<cplx>& pts, double tol) {
  std::vector<cplx> out;
  for (cplx p : pts) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](cplx q) { return std::abs(p - q) <= tol; });
    if (!seen) out.push_back(p);
  }
  return out;
}

double min_pairwise_distance(const std::vector<cplx>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

PairStructuredResult integrate_pair_structured(const PairStructuredProblem& p) {
  const int d = static_cast<int>(p.axes.size());
  if (d == 0 || p.half_axes.size() != p.axes.size()) throw std::invalid_argument("integrate_pair_structured: bad axes");
  std::vector<std::vector<cplx>> g(d), ratio(d);
  for (int n = 0; n < d; ++n) {
    const auto& ax = p.axes[n];
    g[n].resize(ax.points.size());
    ratio[n].resize(ax.points.size());
    for (std::size_t j = 0; j < ax.points.size(); ++j) {
      g[n][j] = ax.weights[j] == 0.0 ? cplx(0.0) : ax.weights[j] * p.single(n, ax.points[j]);
      ratio[n][j] = ax.weights[j] == 0.0 ? cplx(0.0) : p.half_axes[n].weights[j] / ax.weights[j];
    }
  }
  // H[m][n] flattened as [jm * size_n + jn]
  std::vector<std::vector<std::vector<cplx>>> H(d, std::vector<std::vector<cplx>>(d));
  for (int n = 1; n < d; ++n)
    for (int m = 0; m < n; ++m) {
      const auto& am = p.axes[m].points;
      const auto& an = p.axes[n].points;
      auto& t = H[m][n];
      t.resize(am.size() * an.size());
      for (std::size_t a = 0; a < am.size(); ++a)
        for (std::size_t b = 0; b < an.size(); ++b) t[a * an.size() + b] = p.pair(m, n, am[a], an[b]);
    }

  cplx full = 0.0, coarse = 0.0;
  std::vector<std::size_t> idx(d);
  auto rec = [&](auto&& self, int n, cplx partial, cplx r) -> void {
    const std::size_t sz = p.axes[n].points.size();
    for (std::size_t j = 0; j < sz; ++j) {
      cplx v = g[n][j];
      if (v == 0.0) continue;
      v *= partial;
      for (int m = 0; m < n; ++m) v *= H[m][n][idx[m] * sz + j];
      const cplx rr = r * ratio[n][j];
      if (n + 1 == d) {
        full += v;
        coarse += v * rr;
      } else {
        idx[n] = j;
        self(self, n + 1, v, rr);
      }
    }
  };
  rec(rec, 0, cplx(1.0), cplx(1.0));
  return {full, std::abs(full - coarse)};
}

}  // namespace rmtlab
