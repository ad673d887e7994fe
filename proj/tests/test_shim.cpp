#include <doctest.h>

#include <vector>

#include "mpiabi/constants.hpp"
#include "mpiabi/demos.hpp"
#include "mpiabi/shim.hpp"

using namespace mpiabi;
using shim::Shim;
namespace c = constants;

namespace {
const AbiHandle kWorld{0x101};
const AbiHandle kInt32{0x250};
const AbiHandle kSum{0x021};
}  // namespace

TEST_CASE("calls before init and after finalize fail with ERR_OTHER") {
  Shim s;
  int size = 0;
  CHECK(s.comm_size(kWorld, &size) == c::ERR_OTHER);
  sim::Engine engine(1);
  REQUIRE(s.init("int", engine) == 0);
  CHECK(s.comm_size(kWorld, &size) == 0);
  CHECK(size == 1);
  CHECK(s.finalize() == 0);
  CHECK(s.comm_size(kWorld, &size) == c::ERR_OTHER);
}

TEST_CASE("init with an unknown backend reports failure") {
  Shim s;
  sim::Engine engine(1);
  CHECK(s.init("bogus", engine) != 0);
  CHECK_FALSE(s.initialized());
}

TEST_CASE("library identity is backend independent") {
  sim::Engine e1(1), e2(1);
  Shim a, b;
  REQUIRE(a.init("int", e1) == 0);
  REQUIRE(b.init("token", e2) == 0);
  CHECK(a.library_version() == "libmpi_abi 1.0.0");
  CHECK(a.library_version() == b.library_version());
  CHECK(a.backend_name() == "int");
  CHECK(b.backend_name() == "token");
  a.finalize();
  b.finalize();
}

TEST_CASE("handle value zero is rejected with the kind's error class") {
  for (const char* backend : {"int", "token"}) {
    CAPTURE(backend);
    sim::Engine engine(1);
    Shim s;
    REQUIRE(s.init(backend, engine) == 0);
    int size = 0;
    std::int64_t sz = 0;
    CHECK(s.comm_size(AbiHandle{0}, &size) == c::ERR_COMM);
    CHECK(s.type_size(AbiHandle{0}, &sz) == c::ERR_TYPE);
    AbiHandle h{0};
    CHECK(s.op_free(&h) == c::ERR_OP);
    h.value = 0;
    CHECK(s.wait(&h, nullptr) == c::ERR_REQUEST);
    s.finalize();
  }
}

TEST_CASE("kind mismatches convert to the expected class") {
  sim::Engine engine(1);
  Shim s;
  REQUIRE(s.init("int", engine) == 0);
  int size = 0;
  CHECK(s.comm_size(kInt32, &size) == c::ERR_COMM);  // datatype as comm
  std::int64_t sz = 0;
  CHECK(s.type_size(kWorld, &sz) == c::ERR_TYPE);  // comm as datatype
  // A reserved (unassigned) predefined value is no better.
  CHECK(s.type_size(AbiHandle{0x3FF}, &sz) == c::ERR_TYPE);
  s.finalize();
}

TEST_CASE("predefined conversion covers datatype sizes on both backends") {
  for (const char* backend : {"int", "token"}) {
    CAPTURE(backend);
    sim::Engine engine(1);
    Shim s;
    REQUIRE(s.init(backend, engine) == 0);
    struct Row {
      HandleValue handle;
      std::int64_t size;
    };
    for (const Row& row : std::initializer_list<Row>{{0x240, 1},
                                                     {0x248, 2},
                                                     {0x250, 4},
                                                     {0x258, 8},
                                                     {0x209, 4},
                                                     {0x20B, 8},
                                                     {0x247, 1}}) {
      std::int64_t sz = 0;
      CHECK(s.type_size(AbiHandle{row.handle}, &sz) == 0);
      CHECK(sz == row.size);
    }
    s.finalize();
  }
}

TEST_CASE("user handles pass through and are tracked while alive") {
  for (const char* backend : {"int", "token"}) {
    CAPTURE(backend);
    sim::Engine engine(1);
    Shim s;
    REQUIRE(s.init(backend, engine) == 0);
    CHECK(s.dynamic_map_size() == 0);

    AbiHandle t{};
    REQUIRE(s.type_contiguous(2, kInt32, &t) == 0);
    CHECK(t.value >= 1024);
    CHECK(s.dynamic_map_size() == 1);
    CHECK(s.type_commit(&t) == 0);
    std::int64_t sz = 0;
    CHECK(s.type_size(t, &sz) == 0);
    CHECK(sz == 8);

    AbiHandle stale = t;
    CHECK(s.type_free(&t) == 0);
    CHECK(t.value == 0x200);
    CHECK(s.dynamic_map_size() == 0);
    CHECK(s.type_size(stale, &sz) == c::ERR_TYPE);
    s.finalize();
  }
}

TEST_CASE("success paths return zero without consulting the error maps") {
  sim::Engine engine(1);
  Shim s;
  REQUIRE(s.init("token", engine) == 0);
  sim::ScopedRank ambient(0);
  int rank = -1;
  CHECK(s.comm_rank(kWorld, &rank) == 0);
  CHECK(rank == 0);
  s.finalize();
}

TEST_CASE("error strings name the classes") {
  sim::Engine engine(1);
  Shim s;
  REQUIRE(s.init("int", engine) == 0);
  std::string text;
  CHECK(s.error_string(c::SUCCESS, &text) == 0);
  CHECK(text == "MPI_SUCCESS");
  CHECK(s.error_string(c::ERR_TRUNCATE, &text) == 0);
  CHECK(text == "MPI_ERR_TRUNCATE");
  CHECK(s.error_string(424242, &text) == c::ERR_ARG);
  s.finalize();
}

TEST_CASE("get_count converts the backend's undefined marker") {
  for (const char* backend : {"int", "token"}) {
    CAPTURE(backend);
    sim::Engine engine(1);
    Shim s;
    REQUIRE(s.init(backend, engine) == 0);
    AbiStatus st;
    st.set_count(10);  // 10 bytes: not a whole number of int32 elements
    std::int64_t n = 0;
    CHECK(s.get_count(st, kInt32, &n) == 0);
    CHECK(n == c::UNDEFINED);
    st.set_count(12);
    CHECK(s.get_count(st, kInt32, &n) == 0);
    CHECK(n == 3);
    s.finalize();
  }
}

TEST_CASE("trampolined user ops observe standard datatype handles") {
  for (const char* backend : {"int", "token"}) {
    CAPTURE(backend);
    auto result = demos::run_demo("userop_allreduce", backend, 4);
    REQUIRE(result.ok);
    REQUIRE(result.observations.size() == 1);
    CHECK(result.observations[0] == 0x250);
  }
}

TEST_CASE("demo transcripts are identical across backends") {
  for (std::string_view name : demos::demo_names()) {
    CAPTURE(name);
    auto on_int = demos::run_demo(name, "int", 3);
    auto on_token = demos::run_demo(name, "token", 3);
    CHECK(on_int.ok);
    CHECK(on_token.ok);
    CHECK(on_int.transcript == on_token.transcript);
    CHECK_FALSE(on_int.transcript.empty());
    CHECK(on_int.leaked_handles == 0);
    CHECK(on_int.leaked_request_state == 0);
  }
}

TEST_CASE("request bookkeeping drains as requests complete") {
  sim::Engine engine(2);
  Shim s;
  REQUIRE(s.init("int", engine) == 0);
  engine.run({[&] {
                std::int32_t v = 1;
                AbiHandle req{};
                REQUIRE(s.isend(&v, 1, kInt32, 1, 0, kWorld, &req) == 0);
                CHECK(s.wait(&req, nullptr) == 0);
                CHECK(req.value == 0x120);
              },
              [&] {
                std::int32_t v = 0;
                AbiHandle req{};
                REQUIRE(s.irecv(&v, 1, kInt32, 0, 0, kWorld, &req) == 0);
                int flag = 0;
                AbiStatus st;
                // testall over one entry, repeatedly, until it completes.
                while (true) {
                  REQUIRE(s.testall(1, &req, &flag, &st) == 0);
                  if (flag) break;
                }
                CHECK(req.value == 0x120);
                CHECK(v == 1);
                CHECK(st.source() == 0);
              }});
  CHECK(s.dynamic_map_size() == 0);
  CHECK(s.request_state_size() == 0);
  s.finalize();
}

TEST_CASE("waiting on the null request succeeds with an empty status") {
  sim::Engine engine(1);
  Shim s;
  REQUIRE(s.init("token", engine) == 0);
  AbiHandle req{0x120};
  AbiStatus st;
  st.set_source(99);
  CHECK(s.wait(&req, &st) == 0);
  CHECK(req.value == 0x120);
  s.finalize();
}
