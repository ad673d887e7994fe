#include <doctest.h>

#include <cstring>
#include <set>

#include "mpiabi/backend_token.hpp"
#include "mpiabi/handles.hpp"

using namespace mpiabi;
using namespace mpiabi::backend;

TEST_CASE("packed status is 24 bytes with a word-sized count") {
  CHECK(sizeof(TokenStyleStatus) == 24);
  sim::StatusPayload p;
  p.source = 2;
  p.tag = 33;
  p.error = 2005;
  p.count_bytes = (std::int64_t{1} << 40) + 7;
  p.cancelled = true;
  TokenStyleStatus s;
  token_status_pack(p, &s);
  std::int32_t head[4];
  std::memcpy(head, &s, 16);
  CHECK(head[0] == 2);
  CHECK(head[1] == 33);
  CHECK(head[2] == 2005);
  CHECK(head[3] == 1);
  std::uint64_t ucount = 0;
  std::memcpy(&ucount, reinterpret_cast<const std::byte*>(&s) + 16, 8);
  CHECK(ucount == (std::uint64_t{1} << 40) + 7);  // no split, full word
  CHECK(token_status_unpack(s) == p);
}

TEST_CASE("tokens are opaque registry keys outside the predefined region") {
  sim::Engine engine(1);
  auto b = backend_registry_get("token", engine);
  const BackendDescriptor& d = b->descriptor();
  CHECK(d.name == "token");
  CHECK(d.status_layout.size_bytes == 24);
  for (const PredefinedRow& row : predefined_rows()) {
    NativeHandle token = d.std_to_native.at(row.value);
    CHECK(token >= 1024);
    CHECK(d.native_to_std.at(token) == row.value);
  }
}

TEST_CASE("type sizes come from registry records, not the token bits") {
  sim::Engine engine(1);
  auto b = backend_registry_get("token", engine);
  b->init();
  const BackendDescriptor& d = b->descriptor();
  NativeHandle int64 = d.std_to_native.at(lookup_predefined("MPI_INT64_T").value);
  std::int64_t size = 0;
  CHECK(b->type_size(int64, &size) == 0);
  CHECK(size == 8);
  // Consecutive tokens do not differ in any size-meaningful way.
  CHECK((int64 & 0xff00) != (size << 8));

  NativeHandle derived = 0;
  CHECK(b->type_contiguous(5, int64, &derived) == 0);
  CHECK(b->type_size(derived, &size) == 0);
  CHECK(size == 40);

  NativeHandle stale = derived;
  CHECK(b->type_free(&derived) == 0);
  // A freed token's record is gone; looking it up is an error.
  CHECK(b->type_size(stale, &size) != 0);
}

TEST_CASE("user tokens are unique across object kinds") {
  sim::Engine engine(2);
  auto b = backend_registry_get("token", engine);
  b->init();
  const BackendDescriptor& d = b->descriptor();
  NativeHandle world = d.std_to_native.at(0x101);
  NativeHandle int32 = d.std_to_native.at(lookup_predefined("MPI_INT32_T").value);

  std::set<NativeHandle> seen;
  for (int i = 0; i < 100; ++i) {
    NativeHandle t = 0;
    REQUIRE(b->type_contiguous(1, int32, &t) == 0);
    CHECK(seen.insert(t).second);
    CHECK(b->type_free(&t) == 0);
  }
  NativeHandle dup = 0;
  engine.run({[&] {
                CHECK(b->comm_dup(world, &dup) == 0);
              },
              [&] {
                NativeHandle mine = 0;
                CHECK(b->comm_dup(world, &mine) == 0);
                CHECK(b->comm_free(&mine) == 0);
              }});
  CHECK(seen.insert(dup).second);
  sim::ScopedRank rank(0);
  CHECK(b->comm_free(&dup) == 0);
}
