#include <doctest.h>

#include <stdexcept>

#include "mpiabi/header_gen.hpp"
#include "mpiabi/manifest.hpp"

using namespace mpiabi;

TEST_CASE("emit and parse round-trip the standard manifest") {
  auto records = standard_manifest();
  CHECK(records.size() > 80);  // 56 handles + constants + callbacks
  std::string text = emit_manifest(records);
  auto parsed = parse_manifest(text);
  CHECK(parsed == records);
  // Emission is deterministic and idempotent.
  CHECK(emit_manifest(parsed) == text);
}

TEST_CASE("records come out sorted by value, name breaking ties") {
  auto records = standard_manifest();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& a = records[i - 1];
    const auto& b = records[i];
    CHECK((a.value < b.value || (a.value == b.value && a.name < b.name)));
  }
}

TEST_CASE("malformed manifests are rejected") {
  CHECK_THROWS_AS(parse_manifest("MPI_SUM\tOp\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("MPI_SUM\tOp\t33\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_manifest("MPI_SUM\tOp\t0xZZ\n"), std::invalid_argument);
}

TEST_CASE("negative values survive the hex round trip") {
  std::vector<ManifestRecord> recs{{"MPI_ANY_SOURCE", "Sentinel", -101}};
  auto parsed = parse_manifest(emit_manifest(recs));
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].value == -101);
}

TEST_CASE("diff reports changed, missing, and extra records") {
  auto a = standard_manifest();
  CHECK(diff_manifests(a, a).empty());

  auto b = a;
  b[3].value += 1;
  auto diffs = diff_manifests(a, b);
  REQUIRE(diffs.size() == 1);
  CHECK(diffs[0].find(a[3].name) != std::string::npos);

  b = a;
  b.pop_back();
  b.push_back({"MPI_EXTRA", "Op", 0x7F});
  diffs = diff_manifests(a, b);
  CHECK(diffs.size() == 2);
}

TEST_CASE("generated header is stable and carries the key constants") {
  std::string h1 = generate_c_header();
  CHECK(h1 == generate_c_header());
  CHECK(h1.find("typedef struct MPI_ABI_Comm* MPI_Comm;") != std::string::npos);
  CHECK(h1.find("#define MPI_SUM ((MPI_Op)0x21)") != std::string::npos);
  CHECK(h1.find("#define MPI_COMM_WORLD ((MPI_Comm)0x101)") != std::string::npos);
  CHECK(h1.find("#define MPI_INT32_T ((MPI_Datatype)0x250)") != std::string::npos);
  CHECK(h1.find("#define MPI_ANY_SOURCE (-101)") != std::string::npos);
  CHECK(h1.find("int MPI_SOURCE;") != std::string::npos);
  CHECK(h1.find("MPI_Status") != std::string::npos);
}
