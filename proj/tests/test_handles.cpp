#include <doctest.h>

#include <set>
#include <stdexcept>

#include "mpiabi/handles.hpp"

using namespace mpiabi;

TEST_CASE("zero is the only invalid value") {
  CHECK(classify_handle(0).disposition == Disposition::Invalid);
  CHECK(classify_handle(1).disposition != Disposition::Invalid);
  CHECK(classify_handle(-1).disposition != Disposition::Invalid);
}

TEST_CASE("values outside the 10-bit region are user space") {
  CHECK(classify_handle(1024).disposition == Disposition::UserSpace);
  CHECK(classify_handle(0x7FFFFFFF).disposition == Disposition::UserSpace);
  CHECK(classify_handle(-5).disposition == Disposition::UserSpace);
  CHECK(classify_handle(INT64_MIN).disposition == Disposition::UserSpace);
}

TEST_CASE("unassigned slots inside the region are reserved") {
  // 0x025 sits between MPI_PROD (0x024) and MPI_BAND (0x028).
  auto c = classify_handle(0x025);
  CHECK(c.disposition == Disposition::Reserved);
  CHECK_FALSE(c.kind.has_value());
  CHECK(classify_handle(1).disposition == Disposition::Reserved);
  CHECK(classify_handle(1023).disposition == Disposition::Reserved);
}

TEST_CASE("rows are unique, sorted, and round-trip by name") {
  std::set<HandleValue> values;
  std::set<std::string_view> names;
  HandleValue prev = 0;
  for (const PredefinedRow& row : predefined_rows()) {
    CHECK(row.value > prev);
    prev = row.value;
    CHECK(values.insert(row.value).second);
    CHECK(names.insert(row.name).second);
    CHECK(row.value > 0);
    CHECK(row.value < kPredefinedRegionEnd);

    auto c = classify_handle(row.value);
    REQUIRE(c.disposition == Disposition::Predefined);
    CHECK(*c.kind == row.kind);
    CHECK(*c.name == row.name);
    CHECK(lookup_predefined(row.name).value == row.value);
  }
}

TEST_CASE("lookup of an unknown name throws") {
  CHECK_THROWS_AS(lookup_predefined("MPI_NOT_A_THING"), std::out_of_range);
}

TEST_CASE("null handles are the kind prefix followed by zeros") {
  CHECK(null_handle_of(HandleKind::Op).value == 0x020);
  CHECK(null_handle_of(HandleKind::Comm).value == 0x100);
  CHECK(null_handle_of(HandleKind::Group).value == 0x104);
  CHECK(null_handle_of(HandleKind::Win).value == 0x108);
  CHECK(null_handle_of(HandleKind::File).value == 0x10C);
  CHECK(null_handle_of(HandleKind::Session).value == 0x110);
  CHECK(null_handle_of(HandleKind::Message).value == 0x114);
  CHECK(null_handle_of(HandleKind::Errhandler).value == 0x118);
  CHECK(null_handle_of(HandleKind::Request).value == 0x120);
  CHECK(null_handle_of(HandleKind::Datatype).value == 0x200);
  // Each null handle is also an enumerated predefined row of its kind.
  for (HandleKind k :
       {HandleKind::Op, HandleKind::Comm, HandleKind::Group, HandleKind::Win,
        HandleKind::File, HandleKind::Session, HandleKind::Message,
        HandleKind::Errhandler, HandleKind::Request, HandleKind::Datatype}) {
    auto c = classify_handle(null_handle_of(k).value);
    REQUIRE(c.disposition == Disposition::Predefined);
    CHECK(*c.kind == k);
  }
}

TEST_CASE("fixed-size datatype handles encode log2 of the size in bits 3-5") {
  // Independent oracle: sizes implied by the type names, frozen here.
  struct Row {
    const char* name;
    int size;
  };
  const Row rows[] = {
      {"MPI_INT8_T", 1},  {"MPI_UINT8_T", 1},  {"MPI_CHAR", 1},
      {"MPI_SIGNED_CHAR", 1}, {"MPI_UNSIGNED_CHAR", 1}, {"MPI_BYTE", 1},
      {"MPI_INT16_T", 2}, {"MPI_UINT16_T", 2}, {"MPI_INT32_T", 4},
      {"MPI_UINT32_T", 4}, {"MPI_INT64_T", 8}, {"MPI_UINT64_T", 8},
  };
  for (const Row& row : rows) {
    AbiHandle h = lookup_predefined(row.name);
    // Prefix 0b1001 in bits 6-9, log2(size) in bits 3-5.
    CHECK((h.value >> 6) == 0b1001);
    auto size = datatype_fixed_size(h);
    REQUIRE(size.has_value());
    CHECK(*size == row.size);
    CHECK(*size == 1 << ((h.value >> 3) & 0x7));
  }
}

TEST_CASE("variable-size datatypes have prefix 0b1000 and no fixed size") {
  for (const char* name : {"MPI_AINT", "MPI_COUNT", "MPI_OFFSET", "MPI_PACKED",
                           "MPI_SHORT", "MPI_INT", "MPI_LONG", "MPI_FLOAT"}) {
    AbiHandle h = lookup_predefined(name);
    CHECK((h.value >> 6) == 0b1000);
    CHECK_FALSE(datatype_fixed_size(h).has_value());
  }
  CHECK_FALSE(datatype_fixed_size(lookup_predefined("MPI_DATATYPE_NULL")).has_value());
}

TEST_CASE("datatype_fixed_size rejects non-datatype handles") {
  CHECK_THROWS_AS(datatype_fixed_size(lookup_predefined("MPI_SUM")),
                  std::domain_error);
  CHECK_THROWS_AS(datatype_fixed_size(AbiHandle{0x101}), std::domain_error);
}
