#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rmtlab/mc.hpp"

using namespace rmtlab;

namespace {

MCEstimate from(const std::vector<double>& xs) {
  MCEstimate e;
  for (double x : xs) e.add(x);
  return e;
}

Experiment uniform_pair(long long samples, int threads, int task_size) {
  Experiment e;
  e.stat_ids = {"u", "u2"};
  e.draw = [](Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return std::vector<double>{u, u * u};
  };
  e.samples = samples;
  e.seed = 42;
  e.threads = threads;
  e.task_size = task_size;
  return e;
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("welford basics") {
  const auto c = from(std::vector<double>(50, 1.0));
  CHECK(c.mean == 1.0);
  CHECK(c.variance() == 0.0);
  const auto e = from({1, 2, 3, 4});
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.variance() == doctest::Approx(5.0 / 3));
  CHECK(e.std_error() == doctest::Approx(std::sqrt(5.0 / 12)));
  CHECK_THROWS_AS(from({1}).variance(), std::logic_error);
}

TEST_CASE("property: merging matches one pass and is associative") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> g(3.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(1 + gen() % 30), b(1 + gen() % 30), c(1 + gen() % 30);
    for (auto* v : {&a, &b, &c})
      for (auto& x : *v) x = g(gen);
    std::vector<double> all = a;
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), c.begin(), c.end());
    const auto whole = from(all);

    auto left = from(a);
    left.merge(from(b));
    left.merge(from(c));
    auto bc = from(b);
    bc.merge(from(c));
    auto right = from(a);
    right.merge(bc);

    for (const auto* m : {&left, &right}) {
      CHECK(m->count == whole.count);
      CHECK(m->mean == doctest::Approx(whole.mean).epsilon(1e-12));
      CHECK(m->m2 == doctest::Approx(whole.m2).epsilon(1e-10));
    }
    MCEstimate empty;
    empty.merge(whole);
    CHECK(empty.mean == whole.mean);
    auto same = whole;
    same.merge(MCEstimate{});
    CHECK(same.m2 == whole.m2);
  }
}

TEST_CASE("seeds") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(task_seed(1, 0) != task_seed(1, 1));
  CHECK(task_seed(1, 0) != task_seed(2, 0));
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  const auto one = run_mc(uniform_pair(10000, 1, 700));
  const auto again = run_mc(uniform_pair(10000, 1, 700));
  const auto three = run_mc(uniform_pair(10000, 3, 700));
  REQUIRE(one.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(one[i].mean == again[i].mean);
    CHECK(one[i].mean == three[i].mean);
    CHECK(one[i].m2 == three[i].m2);
    CHECK(one[i].count == 10000);
    CHECK(one[i].seed == 42);
  }
  CHECK(one[0].stat_id == "u");
  CHECK(std::abs(compare_report(one[0], 0.5).z_score) < 4);
  CHECK(std::abs(compare_report(one[1], 1.0 / 3).z_score) < 4);

  const auto tasks = run_mc_tasks(uniform_pair(2500, 2, 1000));
  REQUIRE(tasks.size() == 3);
  CHECK(tasks[2][0].count == 500);
  // A different task size moves the substreams.
  CHECK(run_mc(uniform_pair(10000, 1, 1000))[0].mean != one[0].mean);
}

TEST_CASE("run argument checks") {
  CHECK_THROWS_AS(run_mc(uniform_pair(1, 1, 10)), std::invalid_argument);
  CHECK_THROWS_AS(run_mc(uniform_pair(100, 1, 0)), std::invalid_argument);
  auto bad = uniform_pair(100, 1, 10);
  bad.draw = [](Rng&) { return std::vector<double>{1.0}; };
  CHECK_THROWS_AS(run_mc(bad), std::logic_error);
}

TEST_CASE("joint cumulants") {
  MomentTable t;
  t[{0}] = 2.0;
  CHECK(joint_cumulant(t, {0}) == 2.0);
  t[{1}] = 3.0;
  t[{0, 1}] = 7.0;
  CHECK(joint_cumulant(t, {0, 1}) == doctest::Approx(1.0));
  // Independent variables: every mixed moment factorizes.
  MomentTable ind;
  const double m[3] = {0.5, 1.5, -2.0};
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> key;
    double p = 1;
    for (int i = 0; i < 3; ++i)
      if (mask >> i & 1) {
        key.push_back(i);
        p *= m[i];
      }
    ind[key] = p;
  }
  CHECK(std::abs(joint_cumulant(ind, {0, 1})) < 1e-14);
  CHECK(std::abs(joint_cumulant(ind, {0, 1, 2})) < 1e-14);
  // Third cumulant of one variable through repeated indices: X = X0 = X1 = X2 ~ Bernoulli(1/2).
  MomentTable b;
  for (int mask = 1; mask < 8; ++mask) {
    std::vector<int> key;
    for (int i = 0; i < 3; ++i)
      if (mask >> i & 1) key.push_back(i);
    b[key] = 0.5;
  }
  CHECK(std::abs(joint_cumulant(b, {0, 1})) == doctest::Approx(0.25));
  CHECK(std::abs(joint_cumulant(b, {0, 1, 2})) < 1e-14);
  CHECK_THROWS_AS(joint_cumulant(t, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(joint_cumulant(t, {}), std::invalid_argument);
}

TEST_CASE("compare report") {
  auto e = from({0.0, 1.0});
  for (int i = 0; i < 49; ++i) {
    e.add(0.0);
    e.add(1.0);
  }
  const auto ok = compare_report(e, 0.5);
  CHECK(ok.z_score == 0.0);
  CHECK(ok.pass);
  const auto far = compare_report(e, 0.5 - 10 * e.std_error());
  CHECK(far.z_score == doctest::Approx(10.0));
  CHECK_FALSE(far.pass);
  CHECK(compare_report(e, 0.5 - 3 * e.std_error(), 2.0).pass == false);
  CHECK_THROWS_AS(compare_report(from({1, 2}), 1.5), std::invalid_argument);
  const auto flat = compare_report(from(std::vector<double>(40, 2.0)), 2.0);
  CHECK(flat.pass);
}

TEST_CASE("csv schema") {
  std::ostringstream os;
  auto e = from(std::vector<double>(40, 1.0));
  e.stat_id = "p1@1";
  e.seed = 5;
  write_verdicts_csv(os, {compare_report(e, 1.0)});
  CHECK(os.str() == "stat_id,mean,stderr,count,seed,z_score,reference,verdict\np1@1,1,0,40,5,0,1,pass\n");
  std::ostringstream es;
  write_estimates_csv(es, {e});
  CHECK(es.str() == "stat_id,mean,stderr,count,seed,z_score,reference,verdict\np1@1,1,0,40,5,,,none\n");
}

TEST_CASE("spectrum experiments") {
  SpectrumExperiment s;
  s.schedule = ProcessSchedule::constant(1, {1, 1}, 2);
  s.beta = BetaClass::kComplex;
  s.stats = {{"p1@1", {{1.0, 1, 0.0}}, 0.0}, {"p1@2", {{1.0, 2, 0.0}}, 0.0}, {"one", {}, 0.0}};
  s.samples = 20000;
  s.seed = 3;
  const auto r = run_mc(make_experiment(s));
  REQUIRE(r.size() == 3);
  CHECK(std::abs(compare_report(r[0], 0.5).z_score) < 4);
  CHECK(std::abs(compare_report(r[1], 0.25).z_score) < 4);
  CHECK(r[2].mean == 1.0);
  CHECK(r[2].variance() == 0.0);

  std::map<int, std::vector<double>> sp{{1, {0.0, std::log(0.5)}}, {2, {std::log(0.25)}}};
  const SpectrumStatistic prod{"x", {{1.0, 1, 0.0}, {2.0, 2, 0.0}}, 0.5};
  CHECK(evaluate_statistic(prod, sp) == doctest::Approx(1.5 * 0.0625 - 0.5));
  const SpectrumStatistic shifted{"y", {{1.0, 2, std::log(0.25)}}, 0.0};
  CHECK(evaluate_statistic(shifted, sp) == doctest::Approx(1.0));
  CHECK_THROWS_AS(evaluate_statistic({"z", {{1.0, 3, 0.0}}, 0.0}, sp), std::logic_error);

  s.stats = {{"p1@3", {{1.0, 3, 0.0}}, 0.0}};
  CHECK_THROWS_AS(make_experiment(s), std::invalid_argument);
  s.ensemble = Ensemble::kJacobiOneStep;
  s.stats = {{"p3@1", {{3.0, 1, 0.0}}, 0.0}};
  CHECK_THROWS_AS(make_experiment(s), std::invalid_argument);
}

}  // TEST_SUITE
