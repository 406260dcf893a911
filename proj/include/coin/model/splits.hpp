#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "coin/data/dataset.hpp"
#include "coin/nn/loss.hpp"
#include "coin/rng.hpp"

namespace coin::model {

using nn::IndexSet;

/// Disjoint node id sets, each sorted ascending.
struct Split {
  IndexSet train;
  IndexSet val;
  IndexSet test;

  friend bool operator==(const Split&, const Split&) = default;
};

/// Per class, draws `train_per_class` training and `val_per_class` validation
/// nodes uniformly without replacement; every other labeled node is test.
inline Split make_splits(const std::vector<int>& labels, std::size_t n_classes, std::uint64_t seed,
                         std::size_t train_per_class = 20, std::size_t val_per_class = 30) {
  std::vector<IndexSet> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == data::kUnlabeled) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
      throw InputError("make_splits: label " + std::to_string(labels[i]) + " outside " + std::to_string(n_classes) +
                       " classes");
    }
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  const std::size_t needed = train_per_class + val_per_class;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (by_class[c].size() < needed) {
      throw InputError("make_splits: class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                       " labeled nodes, need at least " + std::to_string(needed));
    }
  }
  Rng rng(seed);
  Split s;
  for (auto& members : by_class) {
    rng.shuffle(members);
    s.train.insert(s.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(train_per_class));
    s.val.insert(s.val.end(), members.begin() + static_cast<std::ptrdiff_t>(train_per_class),
                 members.begin() + static_cast<std::ptrdiff_t>(needed));
    s.test.insert(s.test.end(), members.begin() + static_cast<std::ptrdiff_t>(needed), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace coin::model
