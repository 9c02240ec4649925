#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rmtlab/samplers.hpp"
#include "rmtlab/schedule.hpp"

namespace rmtlab {

// Streaming mean and sum of squared deviations (Welford), mergeable.
struct MCEstimate {
  std::string stat_id;
  double mean = 0.0;
  double m2 = 0.0;
  long long count = 0;
  std::uint64_t seed = 0;

  void add(double x);
  void merge(const MCEstimate& other);
  // m2 / (count - 1); throws for count < 2.
  double variance() const;
  double std_error() const;
};

std::uint64_t splitmix64(std::uint64_t x);
// Seed of task i: splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15).
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task);

// One draw returns one value per statistic.
struct Experiment {
  std::vector<std::string> stat_ids;
  std::function<std::vector<double>(Rng&)> draw;
  long long samples = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  int task_size = 1000;  // samples per task; fixes the substream layout independently of threads
};

// Per-task estimates in task order.
std::vector<std::vector<MCEstimate>> run_mc_tasks(const Experiment& e);
std::vector<MCEstimate> run_mc(const Experiment& e);

// Factor P_c(y^(T)) = sum_i exp(c (log y_i - log_shift)).
struct PowerSumFactor {
  double c = 1.0;
  int T = 1;
  double log_shift = 0.0;
};

// Product of power sums across times, minus `center`; no factors means the constant 1.
struct SpectrumStatistic {
  std::string id;
  std::vector<PowerSumFactor> factors;
  double center = 0.0;
};

enum class Ensemble {
  kJacobiProduct,   // truncated Haar products following the schedule
  kGinibreProduct,  // N x N Ginibre products
  kJacobiOneStep,   // T = 1 through Wishart factors; only c in {1, 2}
};

struct SpectrumExperiment {
  Ensemble ensemble = Ensemble::kJacobiProduct;
  ProcessSchedule schedule{1, {JacobiParams{}}};
  int N = 1;  // Ginibre size
  BetaClass beta = BetaClass::kComplex;
  std::vector<SpectrumStatistic> stats;
  long long samples = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  int task_size = 1000;
};

Experiment make_experiment(const SpectrumExperiment& s);
double evaluate_statistic(const SpectrumStatistic& st, const std::map<int, std::vector<double>>& spectra);

// Mixed moments keyed by sorted index subsets.
using MomentTable = std::map<std::vector<int>, double>;
// sum over set partitions pi of the subset of (-1)^{|pi|-1} (|pi|-1)! prod_B E[prod_{i in B} X_i].
double joint_cumulant(const MomentTable& table, const std::vector<int>& subset);

struct Verdict {
  std::string stat_id;
  double mean = 0.0;
  double std_error = 0.0;
  long long count = 0;
  std::uint64_t seed = 0;
  double z_score = 0.0;
  double reference = 0.0;
  bool pass = false;
};

constexpr double kDefaultSigmaGate = 4.0;
Verdict compare_report(const MCEstimate& est, double reference, double sigma_gate = kDefaultSigmaGate);

// stat_id,mean,stderr,count,seed,z_score,reference,verdict
void write_verdicts_csv(std::ostream& os, const std::vector<Verdict>& rows);
// Same columns with empty z_score/reference and verdict "none".
void write_estimates_csv(std::ostream& os, const std::vector<MCEstimate>& rows);

}  // namespace rmtlab
