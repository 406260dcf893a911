#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "coin/binio.hpp"
#include "coin/rng.hpp"
#include "coin/text.hpp"

using namespace coin;

TEST(Rng, DeterministicStreams) {
  Rng a(5);
  Rng b(5);
  Rng c(6);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng(5).next_u64(), c.next_u64());
}

TEST(Rng, FrozenFirstDraws) {
  // Pins the stream so cached splits stay valid across builds.
  Rng r(0);
  EXPECT_EQ(r.next_u64(), 16461397835623557320ULL);
  EXPECT_EQ(derive_seed(1, 2), 11209615845322764050ULL);
  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 50; ++p) {
    for (std::uint64_t t = 0; t < 50; ++t) seen.insert(derive_seed(p, t));
  }
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(Rng, UniformAndBelow) {
  Rng r(1);
  double s = 0.0;
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    ++counts[r.below(7)];
  }
  EXPECT_NEAR(s / 70000, 0.5, 0.01);
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, NormalMoments) {
  Rng r(2);
  double s = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    sq += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(3);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}

TEST(Text, ParseNumber) {
  double d = 0;
  EXPECT_TRUE(text::parse_number("+1.5", d));
  EXPECT_EQ(d, 1.5);
  EXPECT_TRUE(text::parse_number("-2e-3", d));
  EXPECT_EQ(d, -2e-3);
  EXPECT_FALSE(text::parse_number("1.5x", d));
  EXPECT_FALSE(text::parse_number("", d));
  int i = 0;
  EXPECT_TRUE(text::parse_number("42", i));
  EXPECT_EQ(i, 42);
  EXPECT_FALSE(text::parse_number("4.2", i));
}

TEST(Text, SplitTrimAndLines) {
  const auto parts = text::split("a\t\tb", '\t');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(text::trim("  x \r"), "x");
  std::vector<std::size_t> nums;
  text::for_each_line("a\r\nb\nc", [&](std::size_t n, std::string_view line) {
    nums.push_back(n);
    EXPECT_EQ(line.find('\r'), std::string_view::npos);
  });
  EXPECT_EQ(nums, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Binio, RoundTripAndBounds) {
  binio::Writer w;
  w.u32(7);
  w.u64(1ULL << 40);
  w.i64(-3);
  w.f64(-0.125);
  w.str("hello");
  const std::string blob = w.take();
  binio::Reader r(blob, "blob");
  EXPECT_EQ(r.u32(), 7u);
  EXPECT_EQ(r.u64(), 1ULL << 40);
  EXPECT_EQ(r.i64(), -3);
  EXPECT_EQ(r.f64(), -0.125);
  EXPECT_EQ(r.str(), "hello");
  EXPECT_TRUE(r.at_end());
  EXPECT_THROW(r.u32(), InputError);

  binio::Writer huge;
  huge.u64(1ULL << 60);
  const std::string h = huge.take();
  binio::Reader hr(h, "huge");
  EXPECT_THROW(hr.count(8), InputError);
}

TEST(Binio, LittleEndianLayout) {
  binio::Writer w;
  w.u32(0x01020304);
  const auto s = w.take();
  EXPECT_EQ(static_cast<unsigned char>(s[0]), 0x04);
  EXPECT_EQ(static_cast<unsigned char>(s[3]), 0x01);
}

TEST(Binio, AtomicWriteAndMissingFile) {
  const auto p = std::filesystem::temp_directory_path() / "coin_atomic_test.txt";
  binio::write_file_atomic(p, "abc");
  EXPECT_EQ(binio::read_file(p), "abc");
  binio::write_file_atomic(p, "de");
  EXPECT_EQ(binio::read_file(p), "de");
  std::filesystem::remove(p);
  try {
    binio::read_file(p);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(p.string()), std::string::npos);
  }
}
