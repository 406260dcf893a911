#pragma once

// Binary bundle cache: magic "COINDS1\0", u32 version, then length-prefixed
// sections in this order: features (rows, cols, f64 data), labels (count,
// i64 each, -1 = unlabeled), graph (an embedded graph cache blob), class
// names (count, strings), provenance. Little-endian throughout.

#include <filesystem>
#include <string>
#include <string_view>

#include "coin/binio.hpp"
#include "coin/data/dataset.hpp"
#include "coin/graph/io.hpp"

namespace coin::data {

inline constexpr std::string_view kBundleMagic{"COINDS1\0", 8};
inline constexpr std::uint32_t kBundleVersion = 1;

inline std::string encode_bundle(const DatasetBundle& b) {
  binio::Writer w;
  w.bytes(kBundleMagic);
  w.u32(kBundleVersion);

  w.u64(b.features.rows());
  w.u64(b.features.cols());
  for (double v : b.features.values()) w.f64(v);

  w.u64(b.labels.size());
  for (int l : b.labels) w.i64(l);

  const std::string g = graph::encode_graph(b.graph);
  w.u64(g.size());
  w.bytes(g);

  w.u64(b.class_names.size());
  for (const auto& name : b.class_names) w.str(name);

  const Provenance& p = b.provenance;
  w.u64(p.sources.size());
  for (const auto& s : p.sources) w.str(s);
  w.str(p.format);
  w.str(p.graph_kind);
  w.u32(p.row_normalized ? 1U : 0U);
  w.u64(p.raw_nodes);
  w.u64(p.dangling_edges);
  w.u64(p.self_loops);
  w.u64(p.zero_feature_rows);
  return w.take();
}

inline DatasetBundle decode_bundle(std::string_view bytes, const std::string& context = "bundle cache") {
  binio::Reader r(bytes, context);
  r.expect_magic(kBundleMagic);
  const auto version = r.u32();
  if (version != kBundleVersion) {
    throw InputError(context + ": unsupported version " + std::to_string(version));
  }
  DatasetBundle b;
  const auto rows = static_cast<std::size_t>(r.u64());
  const auto cols = static_cast<std::size_t>(r.u64());
  if (cols != 0 && rows > (bytes.size() / 8) / cols) throw InputError(context + ": feature section too large");
  std::vector<double> data(rows * cols);
  for (double& v : data) v = r.f64();
  b.features = nn::Tensor(rows, cols, std::move(data));

  b.labels.resize(r.count(8));
  for (int& l : b.labels) l = static_cast<int>(r.i64());

  const auto g_len = r.count(1);
  binio::Reader gr(r.bytes(g_len), context + " (graph section)");
  b.graph = graph::decode_graph(gr);

  b.class_names.resize(r.count(8));
  for (auto& name : b.class_names) name = r.str();

  Provenance& p = b.provenance;
  p.sources.resize(r.count(8));
  for (auto& s : p.sources) s = r.str();
  p.format = r.str();
  p.graph_kind = r.str();
  p.row_normalized = r.u32() != 0;
  p.raw_nodes = static_cast<std::size_t>(r.u64());
  p.dangling_edges = static_cast<std::size_t>(r.u64());
  p.self_loops = static_cast<std::size_t>(r.u64());
  p.zero_feature_rows = static_cast<std::size_t>(r.u64());
  if (!r.at_end()) throw InputError(context + ": trailing bytes");
  b.validate();
  return b;
}

inline void save_bundle(const std::filesystem::path& path, const DatasetBundle& b) {
  binio::write_file_atomic(path, encode_bundle(b));
}

inline DatasetBundle load_bundle(const std::filesystem::path& path) {
  return decode_bundle(binio::read_file(path), path.string());
}

}  // namespace coin::data
