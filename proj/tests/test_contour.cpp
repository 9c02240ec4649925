#include <doctest.h>

#include <cmath>

#include "rmtlab/contour.hpp"

using namespace rmtlab;

namespace {

cplx sum_rule(const QuadratureRule& q, const std::function<cplx(cplx)>& f) {
  cplx s = 0;
  for (std::size_t i = 0; i < q.points.size(); ++i) s += f(q.points[i]) * q.weights[i];
  return s;
}

ContourFamily single(const ContourSpec& s) {
  ContourFamily f;
  f.specs.push_back(s);
  return f;
}

}  // namespace

TEST_SUITE("contour") {

TEST_CASE("single contour residues") {
  const auto unit = contour_nodes(ContourSpec::circle(0.0, 1.0, 64));
  CHECK(std::abs(sum_rule(unit, [](cplx z) { return 1.0 / z; }) - 1.0) < 1e-13);
  CHECK(std::abs(sum_rule(unit, [](cplx z) { return z * z; })) < 1e-12);
  CHECK(std::abs(sum_rule(unit, [](cplx z) { return 1.0 / (z - 2.0); })) < 1e-12);
  const auto big = contour_nodes(ContourSpec::circle(0.0, 3.0, 128));
  CHECK(std::abs(sum_rule(big, [](cplx z) { return 1.0 / (z - 2.0); }) - 1.0) < 1e-12);
  // An ellipse works the same way.
  const auto ell = contour_nodes({cplx(1.0, 0.5), 2.0, 0.7, 128});
  CHECK(std::abs(sum_rule(ell, [](cplx z) { return 1.0 / (z - cplx(2.0, 0.6)); }) - 1.0) < 1e-12);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(ContourSpec::circle(0.0, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ContourSpec::circle(0.0, 1.0, 2).validate(), std::invalid_argument);
  const auto s = ContourSpec::circle(cplx(1, 1), 2.0);
  CHECK(s.level(cplx(1, 1)) < 1.0);
  CHECK(s.level(cplx(4, 1)) > 1.0);
  CHECK(s.level(s.point(0.3)) == doctest::Approx(1.0));
}

TEST_CASE("tensor quadrature") {
  ContourFamily f;
  f.specs = {ContourSpec::circle(0.0, 1.0), ContourSpec::circle(0.0, 1.0)};
  auto r = integrate_tensor([](std::span<const cplx> z) { return 1.0 / (z[0] * z[1]); }, f);
  CHECK(r.converged);
  CHECK(std::abs(r.value - 1.0) < 1e-12);

  f.specs[1] = ContourSpec::circle(0.0, 3.0);
  r = integrate_tensor([](std::span<const cplx> z) { return 1.0 / ((z[1] - z[0]) * z[0]); }, f);
  CHECK(std::abs(r.value - 1.0) < 1e-10);

  // d = 1 is the plain node sum.
  const auto spec = ContourSpec::circle(0.5, 1.5, 64);
  auto g = [](cplx z) { return std::exp(z) / (z - 0.25); };
  const auto one = integrate_tensor([&](std::span<const cplx> z) { return g(z[0]); }, single(spec));
  TensorOptions fixed;
  fixed.max_nodes_per_axis = 64;
  const auto capped = integrate_tensor([&](std::span<const cplx> z) { return g(z[0]); }, single(spec), fixed);
  CHECK(std::abs(capped.value - sum_rule(contour_nodes(spec), g)) < 1e-15);
  CHECK(std::abs(one.value - std::exp(0.25)) < 1e-12);
}

TEST_CASE("property: error estimates shrink geometrically under doubling") {
  // Poles at distance ratio 2 from the circle give contraction 2^-n per n nodes.
  ContourSpec s = ContourSpec::circle(0.0, 1.0, 16);
  auto f = [](std::span<const cplx> z) { return 1.0 / ((z[0] - 2.0) * (z[0] - 0.1)); };
  const auto r = integrate_tensor(f, single(s));
  REQUIRE(r.history.size() >= 3);
  for (std::size_t i = 1; i + 1 < r.history.size(); ++i) {
    if (r.history[i] < 1e-15) break;
    CHECK(r.history[i] <= r.history[i - 1] / 4.0);
  }
  CHECK(std::abs(r.value - 1.0 / (0.1 - 2.0)) < 1e-12);
}

TEST_CASE("property: deformation invariance") {
  // Enclose 0 and 0.5, exclude 3 and -2.5: any radius in (0.5, 2.5) gives the same value.
  auto f = [](std::span<const cplx> z) {
    return std::exp(z[0]) / ((z[0] - 0.5) * z[0] * (z[0] - 3.0) * (z[0] + 2.5));
  };
  const auto base = integrate_tensor(f, single(ContourSpec::circle(0.0, 1.5)));
  for (double scale : {0.9, 1.1}) {
    const auto r = integrate_tensor(f, single(ContourSpec::circle(0.0, 1.5 * scale)));
    CHECK(std::abs(r.value - base.value) < 1e-12);
  }
  // Nested two-variable family: inner circle inside the outer one shifted by 1.
  auto g = [](std::span<const cplx> z) { return 1.0 / (z[0] * (z[1] - z[0] - 1.0) * (z[1] - 5.0)); };
  ContourFamily fam;
  fam.specs = {ContourSpec::circle(0.0, 1.0), ContourSpec::circle(0.0, 2.5)};
  const auto v0 = integrate_tensor(g, fam);
  fam.specs[0] = ContourSpec::circle(0.0, 1.1);
  fam.specs[1] = ContourSpec::circle(0.0, 2.25);
  const auto v1 = integrate_tensor(g, fam);
  CHECK(std::abs(v0.value - v1.value) < 1e-12);
  // Residues at z0 = 0 then z1 = 1: 1 / (1 - 5).
  CHECK(std::abs(v0.value - (-0.25)) < 1e-12);
}

TEST_CASE("constraints") {
  ContourFamily f;
  f.specs = {ContourSpec::circle(0.0, 1.0), ContourSpec::circle(0.0, 3.0)};
  f.constraints.push_back({ContourConstraint::Kind::kEncloses, 0, -1, 0.5, "encloses 0.5"});
  f.constraints.push_back({ContourConstraint::Kind::kExcludes, 1, -1, 4.0, "excludes 4"});
  f.constraints.push_back({ContourConstraint::Kind::kInsideShifted, 0, 1, 1.0, "inside outer + 1"});
  CHECK(f.verify());
  f.constraints.push_back({ContourConstraint::Kind::kExcludes, 1, -1, 2.0, "excludes 2"});
  std::string failed;
  CHECK_FALSE(f.verify(1e-9, &failed));
  CHECK(failed.find("excludes 2") != std::string::npos);
  f.constraints.push_back({ContourConstraint::Kind::kInsideShifted, 1, 0, 0.0, "outer inside inner"});
  CHECK_FALSE(check_constraint(f, f.constraints.back()));
}

TEST_CASE("nested general beta families") {
  // m = 1, k = 1: one circle around -theta N that excludes theta (alpha + M - 1).
  const auto s1 = ProcessSchedule::constant(1, {Rational(1), Rational(1)}, 1);
  const auto f1 = nested_contours_general_beta({1}, Rational(1), 1, s1, {1});
  REQUIRE(f1.specs.size() == 1);
  CHECK(f1.verify());
  CHECK(f1.specs[0].level(cplx(-1.0, 0.0)) < 1.0);
  CHECK(f1.specs[0].level(cplx(1.0, 0.0)) > 1.0);

  // m = 1, k = 2, theta = 1: radii differ by more than 1.
  const auto s2 = ProcessSchedule::constant(2, {Rational(1), Rational(2)}, 1);
  const auto f2 = nested_contours_general_beta({2}, Rational(1), 2, s2, {1});
  REQUIRE(f2.specs.size() == 2);
  CHECK(f2.verify());
  CHECK(f2.specs[1].semi_axis_real - f2.specs[0].semi_axis_real > 1.0);

  // Too little room between -theta N and the exclusion.
  CHECK_THROWS_AS(nested_contours_general_beta({2}, Rational(1, 2), 1, s1, {1}), ContourInfeasible);
  CHECK_THROWS_AS(nested_contours_general_beta({2}, Rational(1), 1, s1, {1}), ContourInfeasible);
}

TEST_CASE("nested beta2 families") {
  const auto s1 = ProcessSchedule::constant(1, {Rational(1), Rational(1)}, 1);
  const auto f1 = nested_contours_beta2({0.5}, 1, s1, {1});
  REQUIRE(f1.specs.size() == 1);
  CHECK(f1.verify());
  CHECK(f1.specs[0].level(cplx(-0.5, 0.0)) < 1.0);
  CHECK(f1.specs[0].level(cplx(1.0, 0.0)) > 1.0);

  const auto s2 = ProcessSchedule::constant(2, {Rational(1), Rational(2)}, 2);
  const auto f2 = nested_contours_beta2({0.25, 0.25}, 2, s2, {2, 1});
  CHECK(f2.specs.size() == 2);
  CHECK(f2.verify());

  // alpha = 0.1 puts the exclusion at 0.1; a large padding cannot avoid it.
  const auto bad = ProcessSchedule::constant(1, {Rational(1, 10), Rational(1)}, 1);
  CHECK_NOTHROW(nested_contours_beta2({0.25}, 1, bad, {1}));
  CHECK_THROWS_AS(nested_contours_beta2({0.25}, 1, bad, {1}, 64, 2.0), ContourInfeasible);
}

TEST_CASE("cluster axes") {
  ClusterAxis ax{{cplx(0.0), cplx(3.0)}, 0.5, 32};
  const auto q = ax.rule();
  CHECK(q.points.size() == 64);
  // Both poles enclosed, one circle each.
  CHECK(std::abs(sum_rule(q, [](cplx z) { return 1.0 / z + 2.0 / (z - 3.0); }) - 3.0) < 1e-12);
  CHECK(std::abs(sum_rule(q, [](cplx z) { return 1.0 / (z - 1.5); })) < 1e-12);
  const auto h = ax.rule(true);
  CHECK(h.points.size() == q.points.size());
  CHECK(std::abs(sum_rule(h, [](cplx z) { return 1.0 / z; }) - 1.0) < 1e-12);

  const auto d = dedupe_points({cplx(1.0), cplx(1.0 + 1e-14), cplx(2.0)});
  CHECK(d.size() == 2);
  CHECK(min_pairwise_distance({cplx(0.0), cplx(3.0), cplx(0.0, 1.0)}) == doctest::Approx(1.0));
}

TEST_CASE("pair structured integration") {
  // int int g0(u) g1(v) h(u, v): u on a residue point 0 with weight 1, v on a circle around 0.
  PairStructuredProblem p;
  QuadratureRule a0{{cplx(0.0)}, {cplx(1.0)}};
  ClusterAxis ax{{cplx(0.0)}, 0.5, 32};
  p.axes = {a0, ax.rule()};
  p.half_axes = {a0, ax.rule(true)};
  p.single = [](int n, cplx u) { return n == 0 ? cplx(2.0) : 1.0 / (u - 0.1); };
  p.pair = [](int, int, cplx u, cplx v) { return std::exp(v - u); };
  const auto r = integrate_pair_structured(p);
  CHECK(std::abs(r.value - 2.0 * std::exp(0.1)) < 1e-12);
  CHECK(r.error_estimate < 1e-10);
}

}  // TEST_SUITE
