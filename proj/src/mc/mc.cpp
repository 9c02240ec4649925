#include "rmtlab/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace rmtlab {

void MCEstimate::add(double x) {
  ++count;
  const double d = x - mean;
  mean += d / static_cast<double>(count);
  m2 += d * (x - mean);
}

void MCEstimate::merge(const MCEstimate& o) {
  if (o.count == 0) return;
  if (count == 0) {
    mean = o.mean;
    m2 = o.m2;
    count = o.count;
    return;
  }
  const double n = static_cast<double>(count + o.count);
  const double d = o.mean - mean;
  mean += d * static_cast<double>(o.count) / n;
  m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
  count += o.count;
}

double MCEstimate::variance() const {
  if (count < 2) throw std::logic_error("MCEstimate: variance needs at least 2 samples");
  return m2 / static_cast<double>(count - 1);
}

double MCEstimate::std_error() const { return std::sqrt(variance() / static_cast<double>(count)); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) {
  return splitmix64(seed + (task + 1) * 0x9E3779B97F4A7C15ULL);
}

std::vector<std::vector<MCEstimate>> run_mc_tasks(const Experiment& e) {
  if (e.samples < 2) throw std::invalid_argument("run_mc: sample budget must be at least 2");
  if (e.task_size < 1) throw std::invalid_argument("run_mc: task size must be positive");
  if (!e.draw) throw std::invalid_argument("run_mc: no sampler");
  const long long ntasks = (e.samples + e.task_size - 1) / e.task_size;
  const std::size_t nstats = e.stat_ids.size();
  std::vector<std::vector<MCEstimate>> out(ntasks, std::vector<MCEstimate>(nstats));
  std::atomic<long long> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (long long t; !failed && (t = next++) < ntasks;) {
        Rng rng(task_seed(e.seed, static_cast<std::uint64_t>(t)));
        const long long n = std::min<long long>(e.task_size, e.samples - t * e.task_size);
        auto& est = out[t];
        for (long long s = 0; s < n; ++s) {
          const auto v = e.draw(rng);
          if (v.size() != nstats) throw std::logic_error("run_mc: sampler returned the wrong number of statistics");
          for (std::size_t k = 0; k < nstats; ++k) est[k].add(v[k]);
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  const int nthreads = std::max(1, std::min<int>(e.threads, static_cast<int>(ntasks)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& task : out)
    for (std::size_t k = 0; k < nstats; ++k) {
      task[k].stat_id = e.stat_ids[k];
      task[k].seed = e.seed;
    }
  return out;
}

std::vector<MCEstimate> run_mc(const Experiment& e) {
  const auto tasks = run_mc_tasks(e);
  std::vector<MCEstimate> total(e.stat_ids.size());
  for (const auto& task : tasks)
    for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(task[k]);
  for (std::size_t k = 0; k < total.size(); ++k) {
    total[k].stat_id = e.stat_ids[k];
    total[k].seed = e.seed;
  }
  return total;
}

double evaluate_statistic(const SpectrumStatistic& st, const std::map<int, std::vector<double>>& spectra) {
  double v = 1.0;
  for (const auto& f : st.factors) {
    const auto it = spectra.find(f.T);
    if (it == spectra.end()) throw std::logic_error("evaluate_statistic: spectrum at T=" + std::to_string(f.T) + " missing");
    double p = 0;
    for (double l : it->second) p += std::exp(f.c * (l - f.log_shift));
    v *= p;
  }
  return v - st.center;
}

Experiment make_experiment(const SpectrumExperiment& s) {
  std::set<int> times;
  for (const auto& st : s.stats)
    for (const auto& f : st.factors) {
      if (f.T < 1) throw std::invalid_argument("statistic " + st.id + ": T must be positive");
      times.insert(f.T);
    }
  const std::vector<int> tv(times.begin(), times.end());
  const int T_max = tv.empty() ? 1 : tv.back();
  Experiment e;
  for (const auto& st : s.stats) e.stat_ids.push_back(st.id);
  e.samples = s.samples;
  e.seed = s.seed;
  e.threads = s.threads;
  e.task_size = s.task_size;
  switch (s.ensemble) {
    case Ensemble::kJacobiProduct:
      if (T_max > s.schedule.length()) throw std::invalid_argument("mc: statistics need more steps than the schedule has");
      e.draw = [s, tv, T_max](Rng& rng) {
        std::map<int, std::vector<double>> sp;
        for (auto& x : product_squared_singular_values(s.schedule, s.beta, T_max, rng, tv)) sp[x.time_index] = std::move(x.log_values);
        std::vector<double> v;
        for (const auto& st : s.stats) v.push_back(evaluate_statistic(st, sp));
        return v;
      };
      break;
    case Ensemble::kGinibreProduct:
      e.draw = [s, tv, T_max](Rng& rng) {
        std::map<int, std::vector<double>> sp;
        for (auto& x : ginibre_product_squared_singular_values(s.beta, s.N, T_max, rng, tv)) sp[x.time_index] = std::move(x.log_values);
        std::vector<double> v;
        for (const auto& st : s.stats) v.push_back(evaluate_statistic(st, sp));
        return v;
      };
      break;
    case Ensemble::kJacobiOneStep: {
      if (T_max != 1) throw std::invalid_argument("mc: the one-step ensemble only has T = 1");
      const auto& step = s.schedule.step(1);
      if (step.alpha.get_den() != 1 || step.M.get_den() != 1) throw std::invalid_argument("mc: one-step ensemble needs integer alpha, M");
      for (const auto& st : s.stats)
        for (const auto& f : st.factors)
          if ((f.c != 1.0 && f.c != 2.0) || f.log_shift != 0.0)
            throw std::invalid_argument("mc: one-step ensemble supports unshifted P_1 and P_2 only");
      const int N = s.schedule.N();
      const int alpha = static_cast<int>(step.alpha.get_num().get_si());
      const int M = static_cast<int>(step.M.get_num().get_si());
      e.draw = [s, N, alpha, M](Rng& rng) {
        const auto [p1, p2] = jacobi_power_sums_one_step(s.beta, N, alpha, M, rng);
        std::vector<double> v;
        for (const auto& st : s.stats) {
          double x = 1;
          for (const auto& f : st.factors) x *= f.c == 1.0 ? p1 : p2;
          v.push_back(x - st.center);
        }
        return v;
      };
      break;
    }
  }
  return e;
}

namespace {

void set_partitions(const std::vector<int>& items, std::size_t i, std::vector<std::vector<int>>& blocks,
                    const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
  if (i == items.size()) {
    visit(blocks);
    return;
  }
  for (auto& b : blocks) {
    b.push_back(items[i]);
    set_partitions(items, i + 1, blocks, visit);
    b.pop_back();
  }
  blocks.push_back({items[i]});
  set_partitions(items, i + 1, blocks, visit);
  blocks.pop_back();
}

}  // namespace

double joint_cumulant(const MomentTable& table, const std::vector<int>& subset) {
  if (subset.empty()) throw std::invalid_argument("joint_cumulant: empty subset");
  double total = 0;
  std::vector<std::vector<int>> blocks;
  set_partitions(subset, 0, blocks, [&](const std::vector<std::vector<int>>& pi) {
    const int d = static_cast<int>(pi.size());
    double term = std::tgamma(d) * ((d % 2) ? 1.0 : -1.0);
    for (auto b : pi) {
      std::sort(b.begin(), b.end());
      const auto it = table.find(b);
      if (it == table.end()) {
        std::string key;
        for (int x : b) key += (key.empty() ? "" : ",") + std::to_string(x);
        throw std::invalid_argument("joint_cumulant: moment {" + key + "} missing");
      }
      term *= it->second;
    }
    total += term;
  });
  return total;
}

Verdict compare_report(const MCEstimate& est, double reference, double sigma_gate) {
  if (est.count < 30) throw std::invalid_argument("compare_report: need at least 30 samples");
  Verdict v{est.stat_id, est.mean, est.std_error(), est.count, est.seed, 0.0, reference, false};
  const double diff = est.mean - reference;
  v.z_score = v.std_error > 0 ? diff / v.std_error : (diff == 0 ? 0.0 : std::copysign(INFINITY, diff));
  v.pass = std::abs(v.z_score) <= sigma_gate;
  return v;
}

void write_verdicts_csv(std::ostream& os, const std::vector<Verdict>& rows) {
  const auto old = os.precision(17);
  os << "stat_id,mean,stderr,count,seed,z_score,reference,verdict\n";
  for (const auto& r : rows)
    os << r.stat_id << ',' << r.mean << ',' << r.std_error << ',' << r.count << ',' << r.seed << ',' << r.z_score << ','
       << r.reference << ',' << (r.pass ? "pass" : "fail") << '\n';
  os.precision(old);
}

void write_estimates_csv(std::ostream& os, const std::vector<MCEstimate>& rows) {
  const auto old = os.precision(17);
  os << "stat_id,mean,stderr,count,seed,z_score,reference,verdict\n";
  for (const auto& r : rows)
    os << r.stat_id << ',' << r.mean << ',' << (r.count >= 2 ? r.std_error() : NAN) << ',' << r.count << ',' << r.seed
       << ",,,none\n";
  os.precision(old);
}

}  // namespace rmtlab
