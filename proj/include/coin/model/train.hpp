#pragma once

// Full-batch training with early stopping and best-epoch restoration.

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "coin/data/dataset.hpp"
#include "coin/model/coin_model.hpp"
#include "coin/model/splits.hpp"
#include "coin/nn/loss.hpp"
#include "coin/nn/optim.hpp"

namespace coin::model {

/// Argmax accuracy over `ids`; ties go to the smallest class index.
inline double accuracy(const nn::Tensor& probs, const std::vector<int>& labels, const IndexSet& ids) {
  if (ids.empty()) throw InputError("accuracy: empty id set");
  std::size_t correct = 0;
  for (std::size_t i : ids) {
    const auto row = probs.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ids.size());
}

/// Features in the layout the model consumes, paired with the bundle's graph and labels.
struct PreparedData {
  nn::SparseRows features;
  const graph::SparseGraph* graph = nullptr;
  const std::vector<int>* labels = nullptr;
  std::size_t n_classes = 0;

  static PreparedData from(const data::DatasetBundle& b) {
    return PreparedData{nn::SparseRows::from_dense(b.features), &b.graph, &b.labels, b.n_classes()};
  }
};

/// Evaluation-mode (no dropout) probabilities u^K.
inline nn::Tensor predict(const CoinModel& m, const PreparedData& d) {
  Rng unused(0);
  return forward(m, d.features, *d.graph, false, unused).output();
}

inline double evaluate(const CoinModel& m, const PreparedData& d, const IndexSet& ids) {
  return accuracy(predict(m, d), *d.labels, ids);
}

inline double evaluate(const CoinModel& m, const data::DatasetBundle& b, const IndexSet& ids) {
  return evaluate(m, PreparedData::from(b), ids);
}

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainReport {
  double best_val_loss = 0.0;  // at the restored epoch
  double best_val_acc = 0.0;   // at the restored epoch
  double test_acc = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double wall_clock_s = 0.0;
  std::vector<EpochRecord> trace;
  std::vector<std::string> warnings;
};

struct TrainResult {
  CoinModel model;
  TrainReport report;
};

/// Seeds derived from cfg.seed: parameter init and dropout use separate streams.
inline std::uint64_t init_seed_of(std::uint64_t run_seed) { return derive_seed(run_seed, 1); }
inline std::uint64_t dropout_seed_of(std::uint64_t run_seed) { return derive_seed(run_seed, 2); }

inline nn::OptimizerState make_optimizer(const CoinConfig& cfg) {
  return cfg.optimizer == nn::OptimizerKind::adam ? nn::make_adam(cfg.lr, cfg.weight_decay)
                                                  : nn::make_sgd(cfg.lr, 0.9, cfg.weight_decay);
}

/// Trains until `patience` consecutive epochs improve neither the validation
/// loss nor the validation accuracy (strictly), then restores the epoch with the
/// lowest validation loss (higher accuracy breaks ties) and scores the test set.
inline TrainResult train(const PreparedData& d, const Split& split, const CoinConfig& cfg) {
  cfg.validate();
  if (split.train.empty() || split.val.empty() || split.test.empty()) {
    throw InputError("train: split has an empty train, val or test set");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto& labels = *d.labels;
  const auto& g = *d.graph;

  TrainResult result{make_model(d.features.cols(), d.n_classes, cfg, init_seed_of(cfg.seed)), {}};
  CoinModel& m = result.model;
  TrainReport& rep = result.report;
  if (!diffusion_is_monotone(g, cfg.sigma2) && cfg.K > 0) {
    rep.warnings.push_back("sigma2 * max Laplacian degree = " + std::to_string(cfg.sigma2 * g.max_laplacian_degree()) +
                           " > 1; diffusion layers are not guaranteed to stay in [0, 1]");
  }

  Rng dropout_rng(dropout_seed_of(cfg.seed));
  nn::OptimizerState opt = make_optimizer(cfg);
  auto params = m.params();

  double best_loss = std::numeric_limits<double>::infinity();
  double best_acc = -1.0;
  std::size_t stale = 0;
  nn::NamedTensors best_state = m.state();
  double sel_loss = std::numeric_limits<double>::infinity();
  double sel_acc = -1.0;
  std::size_t clamped = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    m.zero_grad();
    const ForwardCache cache = forward(m, d.features, g, true, dropout_rng);
    const double train_loss = nn::nll_masked(cache.output(), labels, split.train);
    if (!std::isfinite(train_loss)) throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
    clamped += nn::nll_clamped_count(cache.output(), labels, split.train);
    backward(m, cache, d.features, g, nn::nll_masked_backward(cache.output(), labels, split.train));
    nn::optimizer_step(opt, params);

    const nn::Tensor probs = predict(m, d);
    const double val_loss = nn::nll_masked(probs, labels, split.val);
    const double val_acc = accuracy(probs, labels, split.val);
    if (!std::isfinite(val_loss)) throw NumericError("non-finite validation loss at epoch " + std::to_string(epoch));
    rep.trace.push_back({epoch, train_loss, val_loss, val_acc});
    rep.epochs_run = epoch + 1;

    if (val_loss < sel_loss || (val_loss == sel_loss && val_acc > sel_acc)) {
      sel_loss = val_loss;
      sel_acc = val_acc;
      rep.best_epoch = epoch;
      best_state = m.state();
    }
    bool improved = false;
    if (val_loss < best_loss) {
      best_loss = val_loss;
      improved = true;
    }
    if (val_acc > best_acc) {
      best_acc = val_acc;
      improved = true;
    }
    stale = improved ? 0 : stale + 1;
    if (stale >= cfg.patience) break;
  }

  m.load_state(best_state);
  rep.best_val_loss = sel_loss;
  rep.best_val_acc = sel_acc;
  rep.test_acc = evaluate(m, d, split.test);
  if (clamped > 0) {
    rep.warnings.push_back(std::to_string(clamped) + " training probabilities clamped to " +
                           std::to_string(nn::kProbFloor) + " before the log");
  }
  rep.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

inline TrainResult train(const data::DatasetBundle& b, const Split& split, const CoinConfig& cfg) {
  return train(PreparedData::from(b), split, cfg);
}

}  // namespace coin::model
