#pragma once

// Little-endian binary encoding shared by the graph, dataset and checkpoint caches.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "coin/error.hpp"

namespace coin::binio {

class Writer {
 public:
  void bytes(std::string_view b) { buf_.append(b); }

  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v), 8); }

  void str(std::string_view s) {
    u64(s.size());
    bytes(s);
  }

  const std::string& buffer() const noexcept { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
  }

  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void expect_magic(std::string_view magic) {
    if (bytes(magic.size()) != magic) throw InputError(context_ + ": bad magic bytes");
  }

  std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t u64() { return get_le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get_le(8)); }
  double f64() { return std::bit_cast<double>(get_le(8)); }

  /// Length prefix that must fit in the remaining bytes at `elem_size` bytes per element.
  std::size_t count(std::size_t elem_size) {
    const std::uint64_t n = u64();
    if (elem_size != 0 && n > (data_.size() - pos_) / elem_size) {
      throw InputError(context_ + ": length field " + std::to_string(n) + " exceeds file size");
    }
    return static_cast<std::size_t>(n);
  }

  std::string str() { return std::string(bytes(count(1))); }

  bool at_end() const noexcept { return pos_ == data_.size(); }
  const std::string& context() const noexcept { return context_; }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) throw InputError(context_ + ": truncated file");
  }

  std::uint64_t get_le(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::string_view data_;
  std::string context_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a temporary sibling and a rename so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InputError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace coin::binio
