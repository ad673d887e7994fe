#include "mpiabi/demos.hpp"

#include <algorithm>
#include <cstring>
#include <fmt/format.h>
#include <functional>
#include <mutex>
#include <stdexcept>

#include "mpiabi/constants.hpp"
#include "mpiabi/shim.hpp"

namespace mpiabi::demos {

namespace {

namespace c = constants;
using shim::Shim;

const AbiHandle kWorld{0x101};
const AbiHandle kInt32{0x250};
const AbiHandle kInt64{0x258};
const AbiHandle kOpSum{0x021};

struct DemoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw DemoFailure(what);
}

void require_ok(int rc, const std::string& what) {
  require(rc == 0, fmt::format("{}: error class {}", what, rc));
}

// Per-rank transcript lines, rendered in rank order after the run so the
// output does not depend on thread interleaving.
struct Transcript {
  explicit Transcript(int n) : lines(static_cast<std::size_t>(n)) {}

  void log(int rank, std::string line) {
    lines[static_cast<std::size_t>(rank)].push_back(std::move(line));
  }

  std::string render() const {
    std::string out;
    for (std::size_t r = 0; r < lines.size(); ++r)
      for (const std::string& line : lines[r])
        out += fmt::format("rank {}: {}\n", r, line);
    return out;
  }

  std::vector<std::vector<std::string>> lines;
};

struct DemoContext {
  Shim& shim;
  Transcript& t;
  int ranks;
  DemoResult& result;
};

// -- individual demos; each entry is one rank's program --

void pingpong_rank(DemoContext& ctx, int rank) {
  if (rank > 1) return;
  constexpr int kIters = 3;
  Shim& s = ctx.shim;
  for (int i = 0; i < kIters; ++i) {
    if (rank == 0) {
      std::int32_t payload = 1000 + i;
      require_ok(s.send(&payload, 1, kInt32, 1, 10 + i, kWorld), "send");
      std::int32_t echo = -1;
      AbiStatus st;
      require_ok(s.recv(&echo, 1, kInt32, 1, 20 + i, kWorld, &st), "recv echo");
      std::int64_t n = 0;
      require_ok(s.get_count(st, kInt32, &n), "get_count");
      ctx.t.log(0, fmt::format("echo={} source={} tag={} count={}", echo,
                               st.source(), st.tag(), n));
    } else {
      std::int32_t payload = -1;
      AbiStatus st;
      // Wildcard receive: source and tag both unknown up front.
      require_ok(s.recv(&payload, 1, kInt32, c::ANY_SOURCE, c::ANY_TAG, kWorld,
                        &st),
                 "wildcard recv");
      ctx.t.log(1, fmt::format("got={} source={} tag={} err={}", payload,
                               st.source(), st.tag(), st.error()));
      std::int32_t echo = payload * 2;
      require_ok(s.send(&echo, 1, kInt32, st.source(), 20 + i, kWorld), "echo");
    }
  }
}

void truncation_rank(DemoContext& ctx, int rank) {
  if (rank > 1) return;
  Shim& s = ctx.shim;
  if (rank == 0) {
    std::int32_t big[8] = {1, 2, 3, 4, 5, 6, 7, 8};
    require_ok(s.send(big, 8, kInt32, 1, 5, kWorld), "oversized send");
  } else {
    std::int32_t small[4] = {0, 0, 0, 0};
    AbiStatus st;
    int rc = s.recv(small, 4, kInt32, 0, 5, kWorld, &st);
    require(rc == c::ERR_TRUNCATE,
            fmt::format("expected truncation class, got {}", rc));
    std::int64_t n = 0;
    require_ok(s.get_count(st, kInt32, &n), "get_count");
    ctx.t.log(1, fmt::format("rc={} kept=[{},{},{},{}] count={} status_err={}",
                             rc, small[0], small[1], small[2], small[3], n,
                             st.error()));
  }
}

void dup_isolation_rank(DemoContext& ctx, int rank) {
  Shim& s = ctx.shim;
  AbiHandle dup{};
  require_ok(s.comm_dup(kWorld, &dup), "comm_dup");
  require(dup.value >= 1024, "duplicated comm should be user-space");
  if (rank == 0) {
    std::int32_t on_world = 111, on_dup = 222;
    // Same destination and tag on both communicators; streams must not mix.
    require_ok(s.send(&on_world, 1, kInt32, 1, 7, kWorld), "send world");
    require_ok(s.send(&on_dup, 1, kInt32, 1, 7, dup), "send dup");
  } else if (rank == 1) {
    std::int32_t got_dup = -1, got_world = -1;
    AbiStatus st;
    require_ok(s.recv(&got_dup, 1, kInt32, 0, 7, dup, &st), "recv dup");
    require_ok(s.recv(&got_world, 1, kInt32, 0, 7, kWorld, &st), "recv world");
    require(got_dup == 222 && got_world == 111, "communicator streams mixed");
    ctx.t.log(1, fmt::format("dup={} world={}", got_dup, got_world));
  }
  require_ok(s.comm_free(&dup), "comm_free");
  require(dup.value == 0x100, "freed comm should be the null handle");
  ctx.t.log(rank, "dup freed");
}

std::mutex g_observed_mu;
std::vector<std::int64_t> g_observed_dtypes;

void userop_allreduce_rank(DemoContext& ctx, int rank) {
  Shim& s = ctx.shim;
  AbiHandle op{};
  shim::UserOpFn fn = [](const void* in, void* inout, int count,
                         AbiHandle dtype) {
    {
      std::lock_guard lock(g_observed_mu);
      g_observed_dtypes.push_back(dtype.value);
    }
    const auto* a = static_cast<const std::int32_t*>(in);
    auto* b = static_cast<std::int32_t*>(inout);
    for (int i = 0; i < count; ++i) b[i] += a[i];
  };
  require_ok(s.op_create(fn, 1, &op), "op_create");
  require(op.value >= 1024, "user op should be user-space");

  std::int32_t send[4], recv[4] = {0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) send[i] = (rank + 1) * (i + 1);
  require_ok(s.allreduce(send, recv, 4, kInt32, op, kWorld), "allreduce");

  int n = ctx.ranks;
  std::int32_t scale = n * (n + 1) / 2;  // sum of (rank+1)
  for (int i = 0; i < 4; ++i)
    require(recv[i] == scale * (i + 1),
            fmt::format("allreduce slot {}: got {}", i, recv[i]));
  ctx.t.log(rank,
            fmt::format("sum=[{},{},{},{}]", recv[0], recv[1], recv[2], recv[3]));
  require_ok(s.op_free(&op), "op_free");
  require(op.value == 0x020, "freed op should be the null handle");
}

void derived_type_rank(DemoContext& ctx, int rank) {
  if (rank > 1) return;
  Shim& s = ctx.shim;
  AbiHandle quad{};
  require_ok(s.type_contiguous(4, kInt32, &quad), "type_contiguous");
  require(quad.value >= 1024, "derived type should be user-space");

  if (rank == 0) {
    // An uncommitted type must be rejected before any of its uses work.
    std::int32_t probe[4] = {0, 0, 0, 0};
    int rc = s.send(probe, 1, quad, 1, 3, kWorld);
    require(rc == c::ERR_TYPE,
            fmt::format("uncommitted send: expected type class, got {}", rc));
    ctx.t.log(0, fmt::format("uncommitted rc={}", rc));
  }
  require_ok(s.type_commit(&quad), "type_commit");
  std::int64_t sz = 0;
  require_ok(s.type_size(quad, &sz), "type_size");
  require(sz == 16, fmt::format("contiguous(4, int32) size: got {}", sz));
  ctx.t.log(rank, fmt::format("size={}", sz));

  if (rank == 0) {
    std::int32_t data[8];
    for (int i = 0; i < 8; ++i) data[i] = 50 + i;
    require_ok(s.send(data, 2, quad, 1, 3, kWorld), "send quads");
  } else {
    std::int32_t data[8] = {0};
    AbiStatus st;
    require_ok(s.recv(data, 2, quad, 0, 3, kWorld, &st), "recv quads");
    std::int64_t n = 0;
    require_ok(s.get_count(st, quad, &n), "get_count quads");
    std::int64_t n32 = 0;
    require_ok(s.get_count(st, kInt32, &n32), "get_count int32");
    require(data[0] == 50 && data[7] == 57, "quad payload corrupted");
    ctx.t.log(1, fmt::format("first={} last={} quads={} ints={}", data[0],
                             data[7], n, n32));
  }
  require_ok(s.type_free(&quad), "type_free");
  require(quad.value == 0x200, "freed type should be the null handle");
}

void alltoallw_rank(DemoContext& ctx, int rank) {
  Shim& s = ctx.shim;
  const int n = ctx.ranks;
  constexpr int kElems = 2;

  // Block (i -> j) uses int64 when i+j is odd, int32 otherwise, so every
  // rank handles a mixed-width exchange in both directions.
  auto block_type = [](int i, int j) {
    return ((i + j) % 2 != 0) ? kInt64 : kInt32;
  };
  auto block_bytes = [&](int i, int j) {
    return kElems * (block_type(i, j).value == kInt64.value ? 8 : 4);
  };

  std::vector<int> scounts(n, kElems), rcounts(n, kElems);
  std::vector<std::int64_t> sdispls(n), rdispls(n);
  std::vector<AbiHandle> stypes(n), rtypes(n);
  std::int64_t soff = 0, roff = 0;
  for (int j = 0; j < n; ++j) {
    stypes[j] = block_type(rank, j);
    rtypes[j] = block_type(j, rank);
    sdispls[j] = soff;
    rdispls[j] = roff;
    soff += block_bytes(rank, j);
    roff += block_bytes(j, rank);
  }

  std::vector<std::byte> sendbuf(static_cast<std::size_t>(soff));
  std::vector<std::byte> recvbuf(static_cast<std::size_t>(roff));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < kElems; ++k) {
      std::int64_t v = 100 * rank + 10 * j + k;
      std::byte* at = sendbuf.data() + sdispls[j];
      if (stypes[j].value == kInt64.value) {
        std::int64_t w = v;
        std::memcpy(at + k * 8, &w, 8);
      } else {
        std::int32_t w = static_cast<std::int32_t>(v);
        std::memcpy(at + k * 4, &w, 4);
      }
    }
  }

  AbiHandle req{};
  require_ok(s.ialltoallw(sendbuf.data(), scounts.data(), sdispls.data(),
                          stypes.data(), recvbuf.data(), rcounts.data(),
                          rdispls.data(), rtypes.data(), kWorld, &req),
             "ialltoallw");
  require(req.value >= 1024, "request should be user-space");

  // Poll with test first to exercise the non-blocking path, then wait.
  int flag = 0;
  AbiStatus st;
  require_ok(s.test(&req, &flag, &st), "test");
  if (!flag) require_ok(s.wait(&req, &st), "wait");
  require(req.value == 0x120, "completed request should be the null handle");

  std::string got;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < kElems; ++k) {
      std::int64_t expect = 100 * j + 10 * rank + k;
      std::int64_t v;
      const std::byte* at = recvbuf.data() + rdispls[j];
      if (rtypes[j].value == kInt64.value) {
        std::int64_t w;
        std::memcpy(&w, at + k * 8, 8);
        v = w;
      } else {
        std::int32_t w;
        std::memcpy(&w, at + k * 4, 4);
        v = w;
      }
      require(v == expect, fmt::format("block {}<-{} elem {}: got {} want {}",
                                       rank, j, k, v, expect));
      got += fmt::format("{}{}", got.empty() ? "" : ",", v);
    }
  }
  ctx.t.log(rank, fmt::format("recv=[{}]", got));
}

struct DemoSpec {
  std::string_view name;
  int min_ranks;
  void (*body)(DemoContext&, int rank);
};

constexpr DemoSpec kDemos[] = {
    {"pingpong", 2, pingpong_rank},
    {"truncation", 2, truncation_rank},
    {"dup_isolation", 2, dup_isolation_rank},
    {"userop_allreduce", 2, userop_allreduce_rank},
    {"derived_type", 2, derived_type_rank},
    {"alltoallw", 2, alltoallw_rank},
};

constexpr std::string_view kDemoNames[] = {
    "pingpong",     "truncation",   "dup_isolation",
    "userop_allreduce", "derived_type", "alltoallw",
};

}  // namespace

std::span<const std::string_view> demo_names() { return kDemoNames; }

DemoResult run_demo(std::string_view name, std::string_view backend_name,
                    int ranks) {
  const DemoSpec* spec = nullptr;
  for (const DemoSpec& d : kDemos)
    if (d.name == name) spec = &d;
  if (!spec) throw std::out_of_range("unknown demo: " + std::string(name));
  if (ranks < spec->min_ranks || ranks > 64)
    throw std::invalid_argument(
        fmt::format("demo {} needs between {} and 64 ranks", name,
                    spec->min_ranks));

  DemoResult result;
  sim::Engine engine(ranks);
  Shim shim;
  if (int rc = shim.init(backend_name, engine); rc != 0)
    throw std::out_of_range("unknown backend: " + std::string(backend_name));

  if (name == "userop_allreduce") {
    std::lock_guard lock(g_observed_mu);
    g_observed_dtypes.clear();
  }

  Transcript transcript(ranks);
  DemoContext ctx{shim, transcript, ranks, result};
  std::vector<std::function<void()>> programs;
  for (int r = 0; r < ranks; ++r)
    programs.emplace_back([&, r] { spec->body(ctx, r); });

  try {
    engine.run(std::move(programs));
  } catch (const DemoFailure& f) {
    result.ok = false;
    result.message = f.what();
  }

  result.transcript = transcript.render();
  result.leaked_handles = shim.dynamic_map_size();
  result.leaked_request_state = shim.request_state_size();
  if (result.ok && (result.leaked_handles || result.leaked_request_state)) {
    result.ok = false;
    result.message = fmt::format("leaked state: {} handles, {} request records",
                                 result.leaked_handles,
                                 result.leaked_request_state);
  }
  if (name == "userop_allreduce") {
    std::lock_guard lock(g_observed_mu);
    std::sort(g_observed_dtypes.begin(), g_observed_dtypes.end());
    g_observed_dtypes.erase(
        std::unique(g_observed_dtypes.begin(), g_observed_dtypes.end()),
        g_observed_dtypes.end());
    result.observations = g_observed_dtypes;
  }
  shim.finalize();
  return result;
}

}  // namespace mpiabi::demos
