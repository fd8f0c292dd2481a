#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "antflow/rng.hpp"

using antflow::Philox4x32;
using antflow::Rng;

TEST_CASE("philox known-answer vectors") {
  using Ctr = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  CHECK(Philox4x32::encrypt(Ctr{0, 0, 0, 0}, Key{0, 0}) == Ctr{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt(Ctr{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, Key{0xffffffff, 0xffffffff}) ==
        Ctr{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt(Ctr{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, Key{0xa4093822, 0x299f31d0}) ==
        Ctr{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same seed and stream reproduce") {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("streams differ") {
  Rng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 1000; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("discard skips ahead") {
  Philox4x32 a(7, 0), b(7, 0);
  for (int i = 0; i < 37; ++i) a();
  b.discard(37);
  for (int i = 0; i < 20; ++i) CHECK(a() == b());
}

TEST_CASE("uniform and below stay in range") {
  Rng r(1, 0);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = r.below(7);
    REQUIRE(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);
  CHECK(r.below(1) == 0);
}

TEST_CASE("below is roughly uniform") {
  Rng r(9, 0);
  std::array<int, 5> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[r.below(5)];
  for (int c : counts) CHECK(std::abs(c - n / 5) < 5 * std::sqrt(n * 0.2 * 0.8));
}
