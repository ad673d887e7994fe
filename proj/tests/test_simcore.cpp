#include <doctest.h>

#include <cstring>
#include <numeric>
#include <vector>

#include "mpiabi/simcore.hpp"

using namespace mpiabi::sim;

namespace {

struct Fixture {
  explicit Fixture(int ranks) : engine(ranks) {
    int32 = engine.register_builtin_type(4, NumKind::Int);
    f64 = engine.register_builtin_type(8, NumKind::Float);
  }
  Engine engine;
  int int32 = 0;
  int f64 = 0;
};

}  // namespace

TEST_CASE("blocking send and recv move bytes and fill the status") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   std::int32_t v = 77;
                   CHECK(fx.engine.send(kCommWorld, 1, 5, &v, 1, fx.int32) ==
                         Err::ok);
                 },
                 [&] {
                   std::int32_t v = 0;
                   StatusPayload st;
                   CHECK(fx.engine.recv(kCommWorld, 0, 5, &v, 1, fx.int32,
                                        &st) == Err::ok);
                   CHECK(v == 77);
                   CHECK(st.source == 0);
                   CHECK(st.tag == 5);
                   CHECK(st.count_bytes == 4);
                 }});
}

TEST_CASE("wildcard source and tag match any pending message") {
  Fixture fx(3);
  fx.engine.run({[&] {
                   std::int32_t v = 0;
                   StatusPayload st;
                   CHECK(fx.engine.recv(kCommWorld, kAnySource, kAnyTag, &v, 1,
                                        fx.int32, &st) == Err::ok);
                   CHECK(v == 100 + st.source);
                   CHECK(st.tag == 40 + st.source);
                   CHECK(fx.engine.recv(kCommWorld, kAnySource, kAnyTag, &v, 1,
                                        fx.int32, &st) == Err::ok);
                   CHECK(v == 100 + st.source);
                 },
                 [&] {
                   std::int32_t v = 101;
                   CHECK(fx.engine.send(kCommWorld, 0, 41, &v, 1, fx.int32) ==
                         Err::ok);
                 },
                 [&] {
                   std::int32_t v = 102;
                   CHECK(fx.engine.send(kCommWorld, 0, 42, &v, 1, fx.int32) ==
                         Err::ok);
                 }});
}

TEST_CASE("messages between one pair on one comm do not overtake") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   for (std::int32_t i = 0; i < 50; ++i)
                     CHECK(fx.engine.send(kCommWorld, 1, 1, &i, 1, fx.int32) ==
                           Err::ok);
                 },
                 [&] {
                   for (std::int32_t i = 0; i < 50; ++i) {
                     std::int32_t v = -1;
                     CHECK(fx.engine.recv(kCommWorld, 0, 1, &v, 1, fx.int32,
                                          nullptr) == Err::ok);
                     CHECK(v == i);
                   }
                 }});
}

TEST_CASE("truncation keeps a prefix and reports the error") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   std::int32_t big[6] = {1, 2, 3, 4, 5, 6};
                   CHECK(fx.engine.send(kCommWorld, 1, 0, big, 6, fx.int32) ==
                         Err::ok);
                 },
                 [&] {
                   std::int32_t small[2] = {0, 0};
                   StatusPayload st;
                   CHECK(fx.engine.recv(kCommWorld, 0, 0, small, 2, fx.int32,
                                        &st) == Err::truncate);
                   CHECK(small[0] == 1);
                   CHECK(small[1] == 2);
                   CHECK(st.count_bytes == 8);
                 }});
}

TEST_CASE("isend completes immediately; irecv waits for a match") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   std::int32_t v = 5;
                   int req = 0;
                   CHECK(fx.engine.isend(kCommWorld, 1, 0, &v, 1, fx.int32,
                                         &req) == Err::ok);
                   bool done = false;
                   CHECK(fx.engine.get_status(req, &done, nullptr) == Err::ok);
                   CHECK(done);  // buffered: complete on posting
                   CHECK(fx.engine.wait(req, nullptr) == Err::ok);
                 },
                 [&] {
                   std::int32_t v = 0;
                   int req = 0;
                   CHECK(fx.engine.irecv(kCommWorld, 0, 0, &v, 1, fx.int32,
                                         &req) == Err::ok);
                   StatusPayload st;
                   CHECK(fx.engine.wait(req, &st) == Err::ok);
                   CHECK(v == 5);
                   // A completed-and-waited request id is dead.
                   CHECK(fx.engine.wait(req, nullptr) == Err::invalid_handle);
                 }});
}

TEST_CASE("get_status does not consume; request_free on pending fails") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   std::int32_t v = 0;
                   int req = 0;
                   CHECK(fx.engine.irecv(kCommWorld, 1, 0, &v, 1, fx.int32,
                                         &req) == Err::ok);
                   bool done = true;
                   CHECK(fx.engine.get_status(req, &done, nullptr) == Err::ok);
                   // Nothing sent yet (peer is blocked on our send), so the
                   // request is still pending and cannot be freed.
                   if (!done) CHECK(fx.engine.request_free(req) == Err::pending);
                   std::int32_t go = 1;
                   CHECK(fx.engine.send(kCommWorld, 1, 9, &go, 1, fx.int32) ==
                         Err::ok);
                   CHECK(fx.engine.wait(req, nullptr) == Err::ok);
                   CHECK(v == 6);
                 },
                 [&] {
                   std::int32_t go = 0;
                   CHECK(fx.engine.recv(kCommWorld, 0, 9, &go, 1, fx.int32,
                                        nullptr) == Err::ok);
                   std::int32_t v = 6;
                   CHECK(fx.engine.send(kCommWorld, 0, 0, &v, 1, fx.int32) ==
                         Err::ok);
                 }});
}

TEST_CASE("duplicated communicators have isolated message streams") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   int dup = 0;
                   CHECK(fx.engine.comm_dup(kCommWorld, &dup) == Err::ok);
                   std::int32_t a = 1, b = 2;
                   CHECK(fx.engine.send(kCommWorld, 1, 3, &a, 1, fx.int32) ==
                         Err::ok);
                   CHECK(fx.engine.send(dup, 1, 3, &b, 1, fx.int32) == Err::ok);
                   CHECK(fx.engine.comm_free(dup) == Err::ok);
                 },
                 [&] {
                   int dup = 0;
                   CHECK(fx.engine.comm_dup(kCommWorld, &dup) == Err::ok);
                   std::int32_t v = 0;
                   CHECK(fx.engine.recv(dup, 0, 3, &v, 1, fx.int32, nullptr) ==
                         Err::ok);
                   CHECK(v == 2);
                   CHECK(fx.engine.recv(kCommWorld, 0, 3, &v, 1, fx.int32,
                                        nullptr) == Err::ok);
                   CHECK(v == 1);
                   CHECK(fx.engine.comm_free(dup) == Err::ok);
                 }});
}

TEST_CASE("comm_self delivers only within a rank") {
  Fixture fx(2);
  fx.engine.run({[&] {
                   std::int32_t v = 10;
                   int req = 0;
                   CHECK(fx.engine.isend(kCommSelf, 0, 0, &v, 1, fx.int32,
                                         &req) == Err::ok);
                   CHECK(fx.engine.wait(req, nullptr) == Err::ok);
                   std::int32_t got = 0;
                   CHECK(fx.engine.recv(kCommSelf, 0, 0, &got, 1, fx.int32,
                                        nullptr) == Err::ok);
                   CHECK(got == 10);
                 },
                 [&] {
                   std::int32_t v = 20;
                   int req = 0;
                   CHECK(fx.engine.isend(kCommSelf, 0, 0, &v, 1, fx.int32,
                                         &req) == Err::ok);
                   CHECK(fx.engine.wait(req, nullptr) == Err::ok);
                   std::int32_t got = 0;
                   CHECK(fx.engine.recv(kCommSelf, 0, 0, &got, 1, fx.int32,
                                        nullptr) == Err::ok);
                   CHECK(got == 20);
                 }});
}

TEST_CASE("derived types must be committed before use") {
  Fixture fx(1);
  int quad = 0;
  CHECK(fx.engine.type_contiguous(4, fx.int32, &quad) == Err::ok);
  fx.engine.run({[&] {
    std::int32_t buf[4] = {0};
    int req = 0;
    CHECK(fx.engine.isend(kCommSelf, 0, 0, buf, 1, quad, &req) ==
          Err::not_committed);
    CHECK(fx.engine.type_commit(quad) == Err::ok);
    CHECK(fx.engine.isend(kCommSelf, 0, 0, buf, 1, quad, &req) == Err::ok);
    CHECK(fx.engine.wait(req, nullptr) == Err::ok);
    std::int32_t got[4];
    CHECK(fx.engine.recv(kCommSelf, 0, 0, got, 1, quad, nullptr) == Err::ok);
  }});
  std::int64_t extent = 0;
  CHECK(fx.engine.type_extent(quad, &extent) == Err::ok);
  CHECK(extent == 16);
  CHECK(fx.engine.type_free(quad) == Err::ok);
  CHECK(fx.engine.type_commit(quad) == Err::invalid_handle);
}

TEST_CASE("get_count reports whole elements or undefined") {
  Fixture fx(1);
  StatusPayload st;
  st.count_bytes = 12;
  std::int64_t n = 0;
  CHECK(fx.engine.get_count(st, fx.int32, &n) == Err::ok);
  CHECK(n == 3);
  st.count_bytes = 10;  // not a whole number of 4-byte elements
  CHECK(fx.engine.get_count(st, fx.int32, &n) == Err::ok);
  CHECK(n == kCountUndefined);
}

TEST_CASE("predefined reductions match sequential oracles on every count") {
  for (int ranks = 1; ranks <= 8; ++ranks) {
    Fixture fx(ranks);
    int op_sum = fx.engine.register_op(
        make_predefined_op(PredefOp::Sum, fx.engine), true);
    int op_min = fx.engine.register_op(
        make_predefined_op(PredefOp::Min, fx.engine), true);
    int op_band = fx.engine.register_op(
        make_predefined_op(PredefOp::Band, fx.engine), true);

    constexpr int kElems = 5;
    // Oracle: plain sequential fold over the same contributions.
    auto contrib = [](int rank, int i) {
      return static_cast<std::int32_t>((rank + 2) * (i + 3) + rank);
    };
    std::int32_t want_sum[kElems], want_min[kElems], want_band[kElems];
    for (int i = 0; i < kElems; ++i) {
      want_sum[i] = 0;
      want_min[i] = contrib(0, i);
      want_band[i] = -1;
      for (int r = 0; r < ranks; ++r) {
        want_sum[i] += contrib(r, i);
        want_min[i] = std::min(want_min[i], contrib(r, i));
        want_band[i] &= contrib(r, i);
      }
    }

    std::vector<std::function<void()>> programs;
    for (int r = 0; r < ranks; ++r) {
      programs.emplace_back([&, r] {
        std::int32_t in[kElems], out[kElems];
        for (int i = 0; i < kElems; ++i) in[i] = contrib(r, i);
        CHECK(fx.engine.allreduce(kCommWorld, in, out, kElems, fx.int32,
                                  op_sum) == Err::ok);
        for (int i = 0; i < kElems; ++i) CHECK(out[i] == want_sum[i]);
        CHECK(fx.engine.allreduce(kCommWorld, in, out, kElems, fx.int32,
                                  op_min) == Err::ok);
        for (int i = 0; i < kElems; ++i) CHECK(out[i] == want_min[i]);
        CHECK(fx.engine.reduce(kCommWorld, 0, in, out, kElems, fx.int32,
                               op_band) == Err::ok);
        if (r == 0)
          for (int i = 0; i < kElems; ++i) CHECK(out[i] == want_band[i]);
      });
    }
    fx.engine.run(std::move(programs));
  }
}

TEST_CASE("user op folds left to right in rank order") {
  // f(acc, x) = 2*acc + x is not commutative, so the result pins down the
  // fold order exactly.
  for (int ranks = 2; ranks <= 6; ++ranks) {
    Fixture fx(ranks);
    int op = fx.engine.register_op(
        [](const void* in, void* inout, int count, int) {
          const auto* a = static_cast<const std::int32_t*>(in);
          auto* b = static_cast<std::int32_t*>(inout);
          for (int i = 0; i < count; ++i) b[i] = 2 * b[i] + a[i];
        },
        false);

    std::int64_t want = ranks == 0 ? 0 : 1;  // contribution of rank r is r+1
    want = 1;
    for (int r = 1; r < ranks; ++r) want = 2 * want + (r + 1);

    std::vector<std::function<void()>> programs;
    for (int r = 0; r < ranks; ++r) {
      programs.emplace_back([&, r] {
        std::int32_t in = r + 1, out = 0;
        CHECK(fx.engine.allreduce(kCommWorld, &in, &out, 1, fx.int32, op) ==
              Err::ok);
        CHECK(out == static_cast<std::int32_t>(want));
      });
    }
    fx.engine.run(std::move(programs));
  }
}

TEST_CASE("bitwise ops on float types are rejected") {
  Fixture fx(1);
  OpFn band = make_predefined_op(PredefOp::Band, fx.engine);
  double a = 1.0, b = 2.0;
  CHECK_THROWS_AS(band(&a, &b, 1, fx.f64), std::domain_error);
  OpFn minloc = make_predefined_op(PredefOp::Minloc, fx.engine);
  std::int32_t x = 1, y = 2;
  CHECK_THROWS_AS(minloc(&x, &y, 1, fx.int32), std::domain_error);
}

TEST_CASE("ialltoallw permutes blocks per the serialization oracle") {
  constexpr int kRanks = 3;
  Fixture fx(kRanks);
  int int64 = fx.engine.register_builtin_type(8, NumKind::Int);

  // Mixed type layout: block (i -> j) is int64 when (i + j) odd.
  auto is64 = [](int i, int j) { return (i + j) % 2 != 0; };
  constexpr int kElems = 2;

  // Oracle: build every rank's expected receive buffer by directly
  // serializing the permuted blocks.
  auto value = [](int from, int to, int k) {
    return static_cast<std::int64_t>(1000 * from + 100 * to + k);
  };
  std::vector<std::vector<std::byte>> expect(kRanks);
  for (int to = 0; to < kRanks; ++to) {
    for (int from = 0; from < kRanks; ++from) {
      for (int k = 0; k < kElems; ++k) {
        std::int64_t v = value(from, to, k);
        if (is64(from, to)) {
          std::byte raw[8];
          std::memcpy(raw, &v, 8);
          expect[to].insert(expect[to].end(), raw, raw + 8);
        } else {
          auto w = static_cast<std::int32_t>(v);
          std::byte raw[4];
          std::memcpy(raw, &w, 4);
          expect[to].insert(expect[to].end(), raw, raw + 4);
        }
      }
    }
  }

  std::vector<std::function<void()>> programs;
  for (int r = 0; r < kRanks; ++r) {
    programs.emplace_back([&, r] {
      std::vector<int> scounts(kRanks, kElems), rcounts(kRanks, kElems);
      std::vector<std::int64_t> sdispls(kRanks), rdispls(kRanks);
      std::vector<int> stypes(kRanks), rtypes(kRanks);
      std::int64_t soff = 0, roff = 0;
      for (int j = 0; j < kRanks; ++j) {
        stypes[j] = is64(r, j) ? int64 : fx.int32;
        rtypes[j] = is64(j, r) ? int64 : fx.int32;
        sdispls[j] = soff;
        rdispls[j] = roff;
        soff += kElems * (is64(r, j) ? 8 : 4);
        roff += kElems * (is64(j, r) ? 8 : 4);
      }
      std::vector<std::byte> sendbuf(soff), recvbuf(roff);
      for (int j = 0; j < kRanks; ++j)
        for (int k = 0; k < kElems; ++k) {
          std::int64_t v = value(r, j, k);
          if (is64(r, j)) {
            std::memcpy(sendbuf.data() + sdispls[j] + k * 8, &v, 8);
          } else {
            auto w = static_cast<std::int32_t>(v);
            std::memcpy(sendbuf.data() + sdispls[j] + k * 4, &w, 4);
          }
        }
      int req = 0;
      CHECK(fx.engine.ialltoallw(kCommWorld, sendbuf.data(), scounts, sdispls,
                                 stypes, recvbuf.data(), rcounts, rdispls,
                                 rtypes, &req) == Err::ok);
      CHECK(fx.engine.wait(req, nullptr) == Err::ok);
      CHECK(recvbuf == expect[r]);
    });
  }
  fx.engine.run(std::move(programs));
}

TEST_CASE("invalid handles are reported as such") {
  Fixture fx(1);
  int size = 0;
  CHECK(fx.engine.comm_size(999, &size) == Err::invalid_handle);
  std::int64_t extent = 0;
  CHECK(fx.engine.type_extent(999, &extent) == Err::invalid_handle);
  CHECK(fx.engine.op_free(999) == Err::invalid_handle);
  CHECK(fx.engine.wait(999, nullptr) == Err::invalid_handle);
}
