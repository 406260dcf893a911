#pragma once

// Text edge lists and the binary graph cache.
//
// Edge list: one `src<TAB>dst` or `src<TAB>dst<TAB>weight` per line; blank
// lines and lines starting with '#' are ignored.
//
// Graph cache: magic "COINGR1\0", u64 n_nodes, then row_offsets, col_indices
// and weights, each as a u64 length followed by the elements (u64, u64, f64).

#include <filesystem>
#include <string>
#include <string_view>

#include "coin/binio.hpp"
#include "coin/graph/sparse_graph.hpp"
#include "coin/text.hpp"

namespace coin::graph {

inline constexpr std::string_view kGraphMagic{"COINGR1\0", 8};

struct ParsedEdges {
  EdgeList edges;
  std::size_t n_nodes = 0;  // 1 + largest id seen
};

inline ParsedEdges parse_edge_list(std::string_view data, const std::string& source = "edge list") {
  ParsedEdges out;
  text::for_each_line(data, [&](std::size_t line_no, std::string_view line) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') return;
    const auto fields = text::split(line, '\t');
    Edge e;
    const bool ok = (fields.size() == 2 || fields.size() == 3) && text::parse_number(fields[0], e.src) &&
                    text::parse_number(fields[1], e.dst) &&
                    (fields.size() == 2 || text::parse_number(fields[2], e.weight));
    if (!ok || !(e.weight >= 0.0)) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected src<TAB>dst[<TAB>weight]");
    }
    out.n_nodes = std::max(out.n_nodes, std::max(e.src, e.dst) + 1);
    out.edges.push_back(e);
  });
  return out;
}

inline ParsedEdges read_edge_list(const std::filesystem::path& path) {
  return parse_edge_list(binio::read_file(path), path.string());
}

inline void encode_graph(binio::Writer& w, const SparseGraph& g) {
  w.bytes(kGraphMagic);
  w.u64(g.n_nodes());
  w.u64(g.row_offsets().size());
  for (std::size_t v : g.row_offsets()) w.u64(v);
  w.u64(g.col_indices().size());
  for (NodeId v : g.col_indices()) w.u64(v);
  w.u64(g.weights().size());
  for (double v : g.weights()) w.f64(v);
}

inline SparseGraph decode_graph(binio::Reader& r) {
  r.expect_magic(kGraphMagic);
  const auto n = static_cast<std::size_t>(r.u64());
  std::vector<std::size_t> offsets(r.count(8));
  for (auto& v : offsets) v = static_cast<std::size_t>(r.u64());
  std::vector<NodeId> cols(r.count(8));
  for (auto& v : cols) v = static_cast<NodeId>(r.u64());
  std::vector<double> weights(r.count(8));
  for (auto& v : weights) v = r.f64();
  try {
    return SparseGraph(n, std::move(offsets), std::move(cols), std::move(weights));
  } catch (const InputError& e) {
    throw InputError(r.context() + ": " + e.what());
  }
}

inline std::string encode_graph(const SparseGraph& g) {
  binio::Writer w;
  encode_graph(w, g);
  return w.take();
}

inline SparseGraph decode_graph(std::string_view bytes, const std::string& context = "graph cache") {
  binio::Reader r(bytes, context);
  auto g = decode_graph(r);
  if (!r.at_end()) throw InputError(context + ": trailing bytes");
  return g;
}

inline void save_graph(const std::filesystem::path& path, const SparseGraph& g) {
  binio::write_file_atomic(path, encode_graph(g));
}

inline SparseGraph load_graph(const std::filesystem::path& path) {
  return decode_graph(binio::read_file(path), path.string());
}

}  // namespace coin::graph
