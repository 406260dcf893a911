#pragma once

// Parameter checkpoints: magic "COINNN1\0" followed by one record per
// parameter in declaration order: u64 name length, name bytes, u64 rows,
// u64 cols, rows*cols f64 values. All integers little-endian.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coin/binio.hpp"
#include "coin/nn/tensor.hpp"

namespace coin::nn {

inline constexpr std::string_view kCheckpointMagic{"COINNN1\0", 8};

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

inline std::string encode_checkpoint(const NamedTensors& tensors) {
  binio::Writer w;
  w.bytes(kCheckpointMagic);
  for (const auto& [name, t] : tensors) {
    w.str(name);
    w.u64(t.rows());
    w.u64(t.cols());
    for (double v : t.values()) w.f64(v);
  }
  return w.take();
}

inline NamedTensors decode_checkpoint(std::string_view bytes, const std::string& context = "checkpoint") {
  binio::Reader r(bytes, context);
  r.expect_magic(kCheckpointMagic);
  NamedTensors out;
  while (!r.at_end()) {
    std::string name = r.str();
    const std::size_t rows = static_cast<std::size_t>(r.u64());
    const std::size_t cols = static_cast<std::size_t>(r.u64());
    if (cols != 0 && rows > (bytes.size() / 8) / cols) throw InputError(context + ": tensor too large");
    std::vector<double> data(rows * cols);
    for (double& v : data) v = r.f64();
    out.emplace_back(std::move(name), Tensor(rows, cols, std::move(data)));
  }
  return out;
}

inline void save_checkpoint(const std::filesystem::path& path, const NamedTensors& tensors) {
  binio::write_file_atomic(path, encode_checkpoint(tensors));
}

inline NamedTensors load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(binio::read_file(path), path.string());
}

}  // namespace coin::nn
