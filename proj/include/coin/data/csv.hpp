#pragma once

// Tabular inputs: comma-separated, header row required.
// Labels are integers or NaN / empty for unlabeled rows. The optional edge
// file uses the tab-separated edge-list format of graph/io.hpp.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coin/binio.hpp"
#include "coin/data/dataset.hpp"
#include "coin/graph/io.hpp"
#include "coin/graph/knn.hpp"
#include "coin/graph/ops.hpp"
#include "coin/text.hpp"

namespace coin::data {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(std::string_view data, const std::string& source) {
  CsvTable table;
  bool have_header = false;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    std::vector<std::string> fields;
    for (auto f : text::split(line, ',')) fields.emplace_back(text::trim(f));
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      return;
    }
    if (fields.size() != table.header.size()) {
      throw InputError(source + ":" + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                       " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  });
  if (!have_header) throw InputError(source + ": missing header row");
  return table;
}

inline nn::Tensor parse_feature_table(const CsvTable& table, const std::string& source) {
  nn::Tensor x(table.rows.size(), table.header.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      if (!text::parse_number(table.rows[i][j], x(i, j)) || !std::isfinite(x(i, j))) {
        throw InputError(source + ":" + std::to_string(i + 2) + ": non-numeric value in column '" +
                         table.header[j] + "'");
      }
    }
  }
  return x;
}

inline std::vector<int> parse_label_table(const CsvTable& table, const std::string& source) {
  if (table.header.size() != 1) throw InputError(source + ": label file must have exactly one column");
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    std::string v = table.rows[i][0];
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v.empty() || v == "nan") {
      labels.push_back(kUnlabeled);
      continue;
    }
    int label = 0;
    if (!text::parse_number(v, label) || label < 0) {
      throw InputError(source + ":" + std::to_string(i + 2) + ": label must be a non-negative integer or NaN");
    }
    labels.push_back(label);
  }
  return labels;
}

struct CsvOptions {
  bool row_normalize = false;
};

/// Loads features + labels (+ optional edge list). Without an edge file the
/// bundle has an edgeless graph (`graph_kind = "none"`) and must get one from
/// `attach_knn_graph` before training.
inline DatasetBundle load_csv(const std::filesystem::path& features_path, const std::filesystem::path& labels_path,
                              const std::optional<std::filesystem::path>& edges_path, CsvOptions options = {}) {
  const auto ftable = parse_csv(binio::read_file(features_path), features_path.string());
  const auto ltable = parse_csv(binio::read_file(labels_path), labels_path.string());
  nn::Tensor x = parse_feature_table(ftable, features_path.string());
  std::vector<int> labels = parse_label_table(ltable, labels_path.string());
  if (x.rows() != labels.size()) {
    throw InputError("row-count mismatch: " + std::to_string(x.rows()) + " feature rows vs " +
                     std::to_string(labels.size()) + " label rows");
  }
  if (labeled_nodes(labels).empty()) throw InputError(labels_path.string() + ": no labeled nodes");

  DatasetBundle bundle;
  bundle.provenance.format = "csv";
  bundle.provenance.sources = {features_path.string(), labels_path.string()};
  bundle.provenance.raw_nodes = x.rows();
  if (options.row_normalize) {
    bundle.features = row_normalize(x, &bundle.provenance.zero_feature_rows);
    bundle.provenance.row_normalized = true;
  } else {
    bundle.features = std::move(x);
  }
  const int max_label = *std::max_element(labels.begin(), labels.end());
  for (int c = 0; c <= max_label; ++c) bundle.class_names.push_back(std::to_string(c));
  bundle.labels = std::move(labels);

  if (edges_path) {
    bundle.provenance.sources.push_back(edges_path->string());
    const auto parsed = graph::read_edge_list(*edges_path);
    graph::EdgeList kept;
    for (const auto& e : parsed.edges) {
      if (e.src == e.dst) {
        ++bundle.provenance.self_loops;
      } else {
        kept.push_back(e);
      }
    }
    const auto g = graph::from_edge_list(kept, bundle.n_nodes());
    bundle.graph = graph::gcn_normalize(graph::symmetrize(g));
    bundle.provenance.graph_kind = "gcn";
  } else {
    bundle.graph = graph::from_edge_list({}, bundle.n_nodes());
    bundle.provenance.graph_kind = "none";
  }
  bundle.validate();
  return bundle;
}

/// Replaces the bundle's graph with a Gaussian k-NN graph over its features.
/// Returns the number of degenerate (floored) bandwidths.
inline std::size_t attach_knn_graph(DatasetBundle& bundle, std::size_t n_top, std::size_t sigma_k) {
  auto knn = graph::build_knn_gaussian(bundle.features, n_top, sigma_k);
  bundle.graph = std::move(knn.graph);
  bundle.provenance.graph_kind = "knn";
  return knn.degenerate_bandwidths;
}

}  // namespace coin::data
