#pragma once

// Planted-partition citation data with noisy bag-of-words features.

#include <filesystem>
#include <fstream>
#include <string>

#include "coin/data/dataset.hpp"
#include "coin/data/linqs.hpp"
#include "coin/rng.hpp"

namespace synthetic {

struct PlantedOptions {
  std::size_t n_classes = 3;
  std::size_t per_class = 80;
  std::size_t dim = 60;
  std::size_t words_per_node = 6;
  double topic_prob = 0.35;  // chance a word is drawn from the node's class topic
  double mean_degree = 5.0;
  double homophily = 0.9;    // fraction of edges within a class
  std::uint64_t seed = 1;
};

inline coin::data::RawNodes planted_nodes(const PlantedOptions& o, coin::Rng& rng) {
  coin::data::RawNodes raw;
  const std::size_t n = o.n_classes * o.per_class;
  const std::size_t topic = o.dim / o.n_classes;
  for (std::size_t c = 0; c < o.n_classes; ++c) raw.class_names.push_back("class_" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % o.n_classes;
    std::vector<double> row(o.dim, 0.0);
    for (std::size_t w = 0; w < o.words_per_node; ++w) {
      const std::size_t word = rng.bernoulli(o.topic_prob) ? c * topic + rng.below(topic) : rng.below(o.dim);
      row[word] = 1.0;
    }
    raw.ids.push_back("p" + std::to_string(1000 + i));
    raw.features.push_back(std::move(row));
    raw.labels.push_back(static_cast<int>(c));
  }
  return raw;
}

inline std::vector<std::pair<std::string, std::string>> planted_edges(const PlantedOptions& o,
                                                                      const coin::data::RawNodes& raw,
                                                                      coin::Rng& rng) {
  const std::size_t n = raw.ids.size();
  const auto n_edges = static_cast<std::size_t>(o.mean_degree * static_cast<double>(n) / 2.0);
  std::vector<std::pair<std::string, std::string>> pairs;
  // A ring through each class keeps the graph connected.
  for (std::size_t i = 0; i + o.n_classes < n; ++i) pairs.emplace_back(raw.ids[i], raw.ids[i + o.n_classes]);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const std::size_t a = rng.below(n);
    std::size_t b = rng.below(n);
    if (rng.bernoulli(o.homophily)) b = (b / o.n_classes) * o.n_classes + a % o.n_classes;
    if (b >= n) b = a % o.n_classes;
    pairs.emplace_back(raw.ids[a], raw.ids[b]);
  }
  return pairs;
}

inline coin::data::DatasetBundle planted_bundle(const PlantedOptions& o = {}) {
  coin::Rng rng(o.seed);
  auto raw = planted_nodes(o, rng);
  const auto pairs = planted_edges(o, raw, rng);
  coin::data::Provenance prov;
  prov.format = "synthetic";
  return coin::data::assemble_citation_bundle(std::move(raw), pairs, prov);
}

/// Writes the planted data as a LINQS content/cites pair.
inline void write_linqs(const std::filesystem::path& dir, const std::string& name, const PlantedOptions& o = {}) {
  coin::Rng rng(o.seed);
  const auto raw = planted_nodes(o, rng);
  const auto pairs = planted_edges(o, raw, rng);
  std::filesystem::create_directories(dir);
  std::ofstream content(dir / (name + ".content"), std::ios::binary);
  for (std::size_t i = 0; i < raw.ids.size(); ++i) {
    content << raw.ids[i];
    for (double v : raw.features[i]) content << '\t' << static_cast<int>(v);
    content << '\t' << raw.class_names[static_cast<std::size_t>(raw.labels[i])] << '\n';
  }
  std::ofstream cites(dir / (name + ".cites"), std::ios::binary);
  for (const auto& [a, b] : pairs) cites << a << '\t' << b << '\n';
}

}  // namespace synthetic
