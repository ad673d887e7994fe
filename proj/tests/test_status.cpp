#include <doctest.h>

#include <cstring>
#include <random>

#include "mpiabi/status.hpp"

using namespace mpiabi;

TEST_CASE("status is 32 bytes with the public fields up front") {
  CHECK(sizeof(AbiStatus) == 32);
  AbiStatus st;
  st.set_source(7);
  st.set_tag(9);
  st.set_error(3);
  // Field placement checked through raw memory, not the accessors.
  std::int32_t words[8];
  std::memcpy(words, &st, sizeof(st));
  CHECK(words[0] == 7);
  CHECK(words[1] == 9);
  CHECK(words[2] == 3);
}

TEST_CASE("count and cancelled do not disturb the public fields") {
  AbiStatus st;
  st.set_source(-101);
  st.set_tag(42);
  st.set_error(15);
  st.set_count(std::uint64_t{1} << 40);
  st.set_cancelled(true);
  CHECK(st.source() == -101);
  CHECK(st.tag() == 42);
  CHECK(st.error() == 15);
  CHECK(st.count() == std::int64_t{1} << 40);
  CHECK(st.cancelled());
  st.set_cancelled(false);
  CHECK(st.count() == std::int64_t{1} << 40);
  CHECK_FALSE(st.cancelled());
}

TEST_CASE("counts up to 2^63-1 round-trip; larger are rejected") {
  AbiStatus st;
  st.set_count((std::uint64_t{1} << 63) - 1);
  CHECK(st.count() == std::int64_t{(std::uint64_t{1} << 63) - 1});
  CHECK_THROWS_AS(st.set_count(std::uint64_t{1} << 63), std::out_of_range);
  CHECK_THROWS_AS(st.set_count(UINT64_MAX), std::out_of_range);
}

TEST_CASE("randomized round trips over count and cancelled") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 10000; ++i) {
    std::uint64_t count = rng() & ((std::uint64_t{1} << 63) - 1);
    bool cancelled = (rng() & 1) != 0;
    auto source = static_cast<std::int32_t>(rng());
    auto tag = static_cast<std::int32_t>(rng());
    AbiStatus st;
    st.set_source(source);
    st.set_tag(tag);
    st.set_cancelled(cancelled);
    st.set_count(count);
    CHECK(st.count() == static_cast<std::int64_t>(count));
    CHECK(st.cancelled() == cancelled);
    CHECK(st.source() == source);
    CHECK(st.tag() == tag);
  }
}
