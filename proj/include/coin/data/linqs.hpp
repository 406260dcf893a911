#pragma once

// Loader for the LINQS citation distributions.
//
// Cora / Citeseer: `<name>.content` lines are `id<TAB>f1 ... fd<TAB>label`,
// `<name>.cites` lines are `cited<TAB>citing`.
//
// Pubmed-Diabetes uses a tagged variant: the node file starts with
// `NODE<TAB>paper`, a declaration line (`cat=1,2,3:label<TAB>numeric:w-x:0.0 ...`)
// and then `id<TAB>label=K<TAB>w-x=v ...<TAB>summary=...`; the edge file
// starts with `DIRECTED<TAB>cites`, `NO_FEATURES`, then
// `eid<TAB>paper:a<TAB>|<TAB>paper:b`. The format is detected from the first line.

#include <algorithm>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coin/binio.hpp"
#include "coin/data/dataset.hpp"
#include "coin/graph/ops.hpp"
#include "coin/text.hpp"

namespace coin::data {

/// Node table before graph processing.
struct RawNodes {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& source, std::size_t line_no, const std::string& why) {
  throw InputError(source + ":" + std::to_string(line_no) + ": " + why);
}

inline RawNodes parse_linqs_content(std::string_view data, const std::string& source) {
  RawNodes raw;
  std::vector<std::string> label_text;
  std::size_t width = 0;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 3) malformed(source, line_no, "expected id<TAB>features...<TAB>label");
    const std::size_t d = fields.size() - 2;
    if (width == 0) width = d;
    if (d != width) {
      malformed(source, line_no, "feature width " + std::to_string(d) + " differs from " + std::to_string(width));
    }
    std::vector<double> row(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!text::parse_number(fields[k + 1], row[k])) {
        malformed(source, line_no, "non-numeric feature in column " + std::to_string(k + 2));
      }
    }
    raw.ids.emplace_back(text::trim(fields.front()));
    raw.features.push_back(std::move(row));
    label_text.emplace_back(text::trim(fields.back()));
  });
  raw.class_names = label_text;
  std::sort(raw.class_names.begin(), raw.class_names.end());
  raw.class_names.erase(std::unique(raw.class_names.begin(), raw.class_names.end()), raw.class_names.end());
  for (const auto& l : label_text) {
    raw.labels.push_back(static_cast<int>(
        std::lower_bound(raw.class_names.begin(), raw.class_names.end(), l) - raw.class_names.begin()));
  }
  return raw;
}

inline std::vector<std::pair<std::string, std::string>> parse_linqs_cites(std::string_view data,
                                                                           const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    if (text::trim(line).empty()) return;
    const auto fields = text::split(text::trim(line), '\t');
    if (fields.size() != 2) malformed(source, line_no, "expected cited<TAB>citing");
    out.emplace_back(std::string(text::trim(fields[0])), std::string(text::trim(fields[1])));
  });
  return out;
}

inline bool is_pubmed_node_file(std::string_view data) {
  return data.substr(0, data.find('\n')).starts_with("NODE\tpaper");
}

inline RawNodes parse_pubmed_nodes(std::string_view data, const std::string& source) {
  RawNodes raw;
  std::unordered_map<std::string, std::size_t> feature_index;
  std::size_t width = 0;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    if (line_no == 1 || text::trim(line).empty()) return;
    const auto fields = text::split(text::trim(line), '\t');
    if (line_no == 2) {
      for (auto f : fields) {
        if (f.starts_with("cat=")) {
          // cat=1,2,3:label
          const auto colon = f.find(':');
          for (auto name : text::split(f.substr(4, colon - 4), ',')) raw.class_names.emplace_back(name);
        } else if (f.starts_with("numeric:")) {
          const auto rest = f.substr(8);
          feature_index.emplace(std::string(rest.substr(0, rest.find(':'))), width++);
        }
      }
      if (raw.class_names.empty() || width == 0) malformed(source, line_no, "missing label or feature declarations");
      return;
    }
    if (fields.size() < 2) malformed(source, line_no, "expected id<TAB>label=K ...");
    std::vector<double> row(width, 0.0);
    int label = kUnlabeled;
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto f = fields[k];
      const auto eq = f.find('=');
      if (eq == std::string_view::npos) malformed(source, line_no, "expected key=value field");
      const auto key = f.substr(0, eq);
      const auto value = f.substr(eq + 1);
      if (key == "label") {
        const auto it = std::find(raw.class_names.begin(), raw.class_names.end(), value);
        if (it == raw.class_names.end()) malformed(source, line_no, "undeclared label '" + std::string(value) + "'");
        label = static_cast<int>(it - raw.class_names.begin());
      } else if (key == "summary") {
        continue;
      } else {
        const auto it = feature_index.find(std::string(key));
        if (it == feature_index.end()) malformed(source, line_no, "undeclared feature '" + std::string(key) + "'");
        if (!text::parse_number(value, row[it->second])) malformed(source, line_no, "non-numeric feature value");
      }
    }
    if (label == kUnlabeled) malformed(source, line_no, "missing label");
    raw.ids.emplace_back(text::trim(fields.front()));
    raw.features.push_back(std::move(row));
    raw.labels.push_back(label);
  });
  return raw;
}

inline std::vector<std::pair<std::string, std::string>> parse_pubmed_cites(std::string_view data,
                                                                            const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    if (line_no <= 2 || text::trim(line).empty()) return;
    const auto fields = text::split(text::trim(line), '\t');
    if (fields.size() != 4 || fields[2] != "|" || !fields[1].starts_with("paper:") ||
        !fields[3].starts_with("paper:")) {
      malformed(source, line_no, "expected eid<TAB>paper:a<TAB>|<TAB>paper:b");
    }
    out.emplace_back(std::string(fields[1].substr(6)), std::string(fields[3].substr(6)));
  });
  return out;
}

}  // namespace detail

/// Builds a bundle from a node table and raw id pairs: unknown ids and
/// self-citations are dropped and counted, the graph is treated as undirected
/// (max rule), restricted to its largest connected component, features are
/// row-normalized and the adjacency gets GCN normalization.
inline DatasetBundle assemble_citation_bundle(RawNodes raw,
                                              const std::vector<std::pair<std::string, std::string>>& pairs,
                                              Provenance provenance) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < raw.ids.size(); ++i) {
    if (!index.emplace(raw.ids[i], i).second) throw InputError("duplicate node id '" + raw.ids[i] + "'");
  }
  graph::EdgeList edges;
  for (const auto& [a, b] : pairs) {
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      ++provenance.dangling_edges;
      continue;
    }
    if (ia->second == ib->second) {
      ++provenance.self_loops;
      continue;
    }
    edges.push_back({ia->second, ib->second, 1.0});
  }
  const std::size_t n_raw = raw.ids.size();
  // Duplicate citations collapse to weight 1 under the max rule.
  const auto undirected = graph::symmetrize(graph::detail::build_csr(edges, n_raw, graph::detail::Combine::max));
  const auto lcc = graph::largest_connected_component(undirected);

  const std::size_t n = lcc.new_to_old.size();
  const std::size_t d = raw.features.empty() ? 0 : raw.features.front().size();
  nn::Tensor x(n, d);
  std::vector<int> labels(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t old = lcc.new_to_old[k];
    std::copy(raw.features[old].begin(), raw.features[old].end(), x.row(k).begin());
    labels[k] = raw.labels[old];
  }
  provenance.raw_nodes = n_raw;
  provenance.row_normalized = true;
  provenance.graph_kind = "gcn";

  DatasetBundle bundle;
  bundle.features = row_normalize(x, &provenance.zero_feature_rows);
  bundle.labels = std::move(labels);
  bundle.graph = graph::gcn_normalize(lcc.graph);
  bundle.class_names = std::move(raw.class_names);
  bundle.provenance = std::move(provenance);
  bundle.validate();
  return bundle;
}

/// Loads a LINQS content/cites pair (Cora, Citeseer, or the Pubmed tab variant).
inline DatasetBundle load_linqs(const std::filesystem::path& content_path, const std::filesystem::path& cites_path) {
  const std::string content = binio::read_file(content_path);
  const std::string cites = binio::read_file(cites_path);
  Provenance prov;
  prov.sources = {content_path.string(), cites_path.string()};
  if (detail::is_pubmed_node_file(content)) {
    prov.format = "pubmed";
    return assemble_citation_bundle(detail::parse_pubmed_nodes(content, content_path.string()),
                                    detail::parse_pubmed_cites(cites, cites_path.string()), std::move(prov));
  }
  prov.format = "linqs";
  return assemble_citation_bundle(detail::parse_linqs_content(content, content_path.string()),
                                  detail::parse_linqs_cites(cites, cites_path.string()), std::move(prov));
}

}  // namespace coin::data
