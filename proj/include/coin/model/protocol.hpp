#pragma once

// Repeated-split evaluation protocol and (K, sigma2) sweeps.
//
// Seed derivation from the master seed:
//   split seed = derive_seed(derive_seed(master, 1), split)
//   run seed   = derive_seed(derive_seed(split seed, 2), init)
// The split seed fixes the train/val/test partition, so all inits of one
// split (and all sweep cells) see the same partition.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "coin/model/train.hpp"

namespace coin::model {

inline std::uint64_t split_seed(std::uint64_t master, std::size_t split) {
  return derive_seed(derive_seed(master, 1), split);
}

inline std::uint64_t run_seed(std::uint64_t master, std::size_t split, std::size_t init) {
  return derive_seed(derive_seed(split_seed(master, split), 2), init);
}

/// Runs task(i) for i in [0, n) on up to `jobs` threads; the first exception is rethrown.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct RunRecord {
  std::size_t split = 0;
  std::size_t init = 0;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double best_val_loss = 0.0;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double wall_s = 0.0;
  std::vector<std::string> warnings;
};

struct ProtocolSummary {
  double mean = 0.0;  // of test accuracy, in [0, 1]
  double std = 0.0;   // population standard deviation
  std::vector<RunRecord> runs;  // sorted by (split, init)
};

inline void summarize(ProtocolSummary& s) {
  const double n = static_cast<double>(s.runs.size());
  double total = 0.0;
  for (const auto& r : s.runs) total += r.test_acc;
  s.mean = total / n;
  double sq = 0.0;
  for (const auto& r : s.runs) sq += (r.test_acc - s.mean) * (r.test_acc - s.mean);
  s.std = std::sqrt(sq / n);
}

inline std::vector<Split> protocol_splits(const data::DatasetBundle& b, std::size_t n_splits, std::uint64_t master) {
  std::vector<Split> splits;
  splits.reserve(n_splits);
  for (std::size_t s = 0; s < n_splits; ++s) splits.push_back(make_splits(b.labels, b.n_classes(), split_seed(master, s)));
  return splits;
}

/// n_splits x n_inits independent runs; cfg.seed is replaced by the derived run seed.
inline ProtocolSummary run_protocol(const data::DatasetBundle& b, std::size_t n_splits, std::size_t n_inits,
                                    const CoinConfig& cfg, std::uint64_t master_seed, std::size_t jobs = 1) {
  if (n_splits < 1 || n_inits < 1) throw InputError("run_protocol: n_splits and n_inits must be >= 1");
  cfg.validate();
  const PreparedData d = PreparedData::from(b);
  const auto splits = protocol_splits(b, n_splits, master_seed);
  ProtocolSummary summary;
  summary.runs.resize(n_splits * n_inits);
  parallel_for(summary.runs.size(), jobs, [&](std::size_t k) {
    const std::size_t s = k / n_inits;
    const std::size_t i = k % n_inits;
    CoinConfig run_cfg = cfg;
    run_cfg.seed = run_seed(master_seed, s, i);
    const auto result = train(d, splits[s], run_cfg);
    const auto& rep = result.report;
    summary.runs[k] = RunRecord{s, i, run_cfg.seed, rep.epochs_run, rep.best_val_loss, rep.best_val_acc,
                                rep.test_acc, rep.wall_clock_s, rep.warnings};
  });
  summarize(summary);
  return summary;
}

struct SweepRow {
  std::size_t K = 0;
  double sigma2 = 0.0;
  std::size_t split = 0;
  std::size_t init = 0;
  double acc = 0.0;
};

/// Every (K, sigma2) cell evaluated with the same splits and run seeds.
inline std::vector<SweepRow> sweep(const data::DatasetBundle& b, const std::vector<std::size_t>& k_values,
                                   const std::vector<double>& sigma2_values, std::size_t n_splits, std::size_t n_inits,
                                   const CoinConfig& base, std::uint64_t master_seed, std::size_t jobs = 1) {
  if (k_values.empty() || sigma2_values.empty()) throw InputError("sweep: K and sigma2 grids must be non-empty");
  if (n_splits < 1 || n_inits < 1) throw InputError("sweep: n_splits and n_inits must be >= 1");
  base.validate();
  const PreparedData d = PreparedData::from(b);
  const auto splits = protocol_splits(b, n_splits, master_seed);
  const std::size_t per_cell = n_splits * n_inits;
  std::vector<SweepRow> rows(k_values.size() * sigma2_values.size() * per_cell);
  parallel_for(rows.size(), jobs, [&](std::size_t k) {
    const std::size_t cell = k / per_cell;
    const std::size_t run = k % per_cell;
    const std::size_t s = run / n_inits;
    const std::size_t i = run % n_inits;
    CoinConfig cfg = base;
    cfg.K = k_values[cell / sigma2_values.size()];
    cfg.sigma2 = sigma2_values[cell % sigma2_values.size()];
    cfg.seed = run_seed(master_seed, s, i);
    rows[k] = SweepRow{cfg.K, cfg.sigma2, s, i, train(d, splits[s], cfg).report.test_acc};
  });
  return rows;
}

/// Mean accuracy of one sweep cell.
inline double cell_mean(const std::vector<SweepRow>& rows, std::size_t K, double sigma2) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (r.K == K && r.sigma2 == sigma2) {
      total += r.acc;
      ++n;
    }
  }
  if (n == 0) throw InputError("cell_mean: no rows for the requested cell");
  return total / static_cast<double>(n);
}

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace detail

/// Header: split,init,seed,epochs,best_val_loss,val_acc,test_acc,wall_s.
/// wall_s is left empty unless `record_wall_time` is set, so reruns stay byte-identical.
inline std::string results_csv(const ProtocolSummary& s, bool record_wall_time = false) {
  std::string out = "split,init,seed,epochs,best_val_loss,val_acc,test_acc,wall_s\n";
  for (const auto& r : s.runs) {
    out += std::to_string(r.split) + "," + std::to_string(r.init) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.epochs) + "," + detail::fmt("%.10f", r.best_val_loss) + "," +
           detail::fmt("%.6f", r.val_acc) + "," + detail::fmt("%.6f", r.test_acc) + "," +
           (record_wall_time ? detail::fmt("%.3f", r.wall_s) : std::string()) + "\n";
  }
  return out;
}

/// Header: K,sigma2,split,init,acc.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "K,sigma2,split,init,acc\n";
  for (const auto& r : rows) {
    out += std::to_string(r.K) + "," + detail::fmt("%g", r.sigma2) + "," + std::to_string(r.split) + "," +
           std::to_string(r.init) + "," + detail::fmt("%.6f", r.acc) + "\n";
  }
  return out;
}

}  // namespace coin::model
