#include <doctest.h>

#include <cstring>
#include <set>

#include "mpiabi/backend_int.hpp"
#include "mpiabi/constants.hpp"
#include "mpiabi/handles.hpp"

using namespace mpiabi;
using namespace mpiabi::backend;

TEST_CASE("the size macro decodes byte sizes from the handle bits") {
  CHECK(int_native_type_size(int_native::CHAR) == 1);
  CHECK(int_native_type_size(int_native::INT) == 4);
  CHECK(int_native_type_size(int_native::DOUBLE) == 8);
  CHECK(int_native_type_size(int_native::SHORT) == 2);
  CHECK(int_native_type_size(int_native::FLOAT) == 4);
  CHECK(int_native_type_size(int_native::LONG) == 8);
}

TEST_CASE("the builtin pattern covers exactly the 0x4c prefix") {
  CHECK(int_native_is_builtin_datatype(int_native::CHAR));
  CHECK(int_native_is_builtin_datatype(int_native::UINT64_T));
  CHECK_FALSE(int_native_is_builtin_datatype(int_native::DATATYPE_NULL));
  CHECK_FALSE(int_native_is_builtin_datatype(int_native::kUserHandleBase));
  CHECK_FALSE(int_native_is_builtin_datatype(0));
}

TEST_CASE("packed status is 20 bytes with the documented field order") {
  CHECK(sizeof(IntStyleStatus) == 20);
  sim::StatusPayload p;
  p.source = 3;
  p.tag = 17;
  p.error = 65;
  p.count_bytes = 4;
  p.cancelled = false;
  IntStyleStatus s;
  int_status_pack(p, &s);
  std::int32_t raw[5];
  std::memcpy(raw, &s, sizeof(s));
  CHECK(raw[0] == 4);   // count_lo
  CHECK(raw[1] == 0);   // count_hi + cancelled bit
  CHECK(raw[2] == 3);   // source
  CHECK(raw[3] == 17);  // tag
  CHECK(raw[4] == 65);  // error
}

TEST_CASE("a 2^40 byte count splits across the two count words") {
  sim::StatusPayload p;
  p.count_bytes = std::int64_t{1} << 40;
  p.cancelled = true;
  IntStyleStatus s;
  int_status_pack(p, &s);
  // Oracle, assembled bit by bit: low word zero; high word carries
  // 2^40 >> 32 = 256 in bits 1-31 plus the cancelled flag in bit 0.
  CHECK(s.count_lo == 0);
  CHECK(s.count_hi_and_cancelled == (256 << 1 | 1));

  sim::StatusPayload back = int_status_unpack(s);
  CHECK(back.count_bytes == std::int64_t{1} << 40);
  CHECK(back.cancelled);

  p.cancelled = false;
  p.count_bytes = (std::int64_t{1} << 40) + 12345;
  int_status_pack(p, &s);
  CHECK(s.count_lo == 12345);
  CHECK(s.count_hi_and_cancelled == (256 << 1));
  CHECK(int_status_unpack(s).count_bytes == p.count_bytes);
}

TEST_CASE("descriptor maps every predefined handle both ways") {
  sim::Engine engine(1);
  auto b = backend_registry_get("int", engine);
  const BackendDescriptor& d = b->descriptor();
  CHECK(d.name == "int");
  CHECK(d.status_layout.size_bytes == 20);
  for (const PredefinedRow& row : predefined_rows()) {
    REQUIRE(d.std_to_native.contains(row.value));
    NativeHandle native = d.std_to_native.at(row.value);
    CHECK(d.native_to_std.at(native) == row.value);
  }
  // Native datatype constants self-describe their sizes.
  CHECK(d.std_to_native.at(lookup_predefined("MPI_INT32_T").value) ==
        int_native::INT32_T);
  CHECK(int_native_type_size(d.std_to_native.at(
            lookup_predefined("MPI_INT64_T").value)) == 8);
}

TEST_CASE("native error codes are distinct from the standard classes") {
  sim::Engine engine(1);
  auto b = backend_registry_get("int", engine);
  const BackendDescriptor& d = b->descriptor();
  std::set<int> classes;
  for (const auto& [native, cls] : d.native_to_class) {
    CHECK(native != cls);  // conversion must actually do something
    CHECK(d.class_to_native.at(cls) == native);
    CHECK(classes.insert(cls).second);
  }
  CHECK_FALSE(d.native_to_class.contains(0));
}

TEST_CASE("type_size works from the bits for builtins, records for derived") {
  sim::Engine engine(1);
  auto b = backend_registry_get("int", engine);
  b->init();
  std::int64_t size = 0;
  CHECK(b->type_size(int_native::INT, &size) == 0);
  CHECK(size == 4);

  NativeHandle derived = 0;
  CHECK(b->type_contiguous(3, int_native::INT64_T, &derived) == 0);
  CHECK_FALSE(int_native_is_builtin_datatype(derived));
  CHECK(b->type_size(derived, &size) == 0);
  CHECK(size == 24);
  CHECK(b->type_free(&derived) == 0);
  CHECK(derived == int_native::DATATYPE_NULL);
  CHECK(b->type_size(NativeHandle{0x12345}, &size) != 0);
}

TEST_CASE("ten thousand allocations never collide with builtin patterns") {
  sim::Engine engine(1);
  auto b = backend_registry_get("int", engine);
  b->init();
  std::set<NativeHandle> seen;
  std::vector<NativeHandle> handles;
  for (int i = 0; i < 10000; ++i) {
    NativeHandle h = 0;
    REQUIRE(b->type_contiguous(1, int_native::CHAR, &h) == 0);
    CHECK(seen.insert(h).second);
    CHECK_FALSE(int_native_is_builtin_datatype(h));
    CHECK(h >= int_native::kUserHandleBase);
    handles.push_back(h);
  }
  for (NativeHandle& h : handles) CHECK(b->type_free(&h) == 0);
}
