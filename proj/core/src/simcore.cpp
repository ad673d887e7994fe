#include "mpiabi/simcore.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mpiabi::sim {

namespace {
thread_local int tls_rank = -1;
}

std::string_view to_string(Err e) {
  switch (e) {
    case Err::ok: return "ok";
    case Err::truncate: return "truncate";
    case Err::invalid_handle: return "invalid_handle";
    case Err::invalid_arg: return "invalid_arg";
    case Err::not_committed: return "not_committed";
    case Err::pending: return "pending";
    case Err::internal: return "internal";
  }
  return "?";
}

ScopedRank::ScopedRank(int rank) : previous_(tls_rank) { tls_rank = rank; }
ScopedRank::~ScopedRank() { tls_rank = previous_; }

namespace {

struct TypeRec {
  TypeInfo info;
  int base = 0;   // contiguous base type
  int count = 0;  // contiguous count
};

struct OpRec {
  OpFn fn;
  bool commutative = false;
};

struct CommRec {
  std::vector<int> group;  // world ranks; empty means self-like
  int frees = 0;
  int expected_frees = 0;
  bool predefined = false;
};

struct ReqRec {
  bool complete = false;
  StatusPayload status;
};

struct Msg {
  int src_world;
  int dst_world;
  int tag;
  int src_comm_rank;
  std::vector<std::byte> payload;
};

struct Posted {
  int req_id;
  int dst_world;
  int src_world_sel;  // kAnySource or a world rank
  int tag_sel;        // kAnyTag or a tag
  void* buf;
  std::int64_t capacity;
};

struct CommQueues {
  std::deque<Msg> unexpected;
  std::deque<Posted> posted;
};

struct RankArgsA2A {
  const void* sendbuf = nullptr;
  std::vector<int> scounts, stypes, rcounts, rtypes;
  std::vector<std::int64_t> sdispls, rdispls;
  void* recvbuf = nullptr;
  int req_id = 0;
};

struct CollRec {
  enum Kind { Reduce, Alltoallw } kind = Reduce;
  int expected = 0;
  int arrived = 0;
  int departed = 0;
  bool done = false;
  Err err = Err::ok;
  // reduce/allreduce
  std::vector<const void*> contribs;
  std::vector<void*> outs;
  int count = 0, dtype = 0, op = 0, root = 0;  // root -1 means allreduce
  // alltoallw
  std::vector<RankArgsA2A> a2a;
  std::vector<bool> a2a_present;
};

}  // namespace

struct Engine::Impl {
  int nranks;
  unsigned seed;

  mutable std::mutex mu;
  std::condition_variable cv;

  int next_type = 1000;
  std::map<int, TypeRec> types;

  int next_op = 1000;
  std::map<int, OpRec> ops;

  int next_comm = 10;
  std::map<int, CommRec> comms;
  std::map<std::pair<int, long>, int> dup_ids;
  std::map<int, std::vector<long>> dup_counts;

  int next_req = 1;
  std::map<int, ReqRec> reqs;

  std::map<int, CommQueues> queues;

  std::map<int, std::vector<long>> coll_counts;
  std::map<std::pair<int, long>, CollRec> colls;

  const CommRec* find_comm(int comm) const {
    auto it = comms.find(comm);
    return it == comms.end() ? nullptr : &it->second;
  }

  // Group membership resolution for the calling rank.
  Err resolve(int comm, int* my_comm_rank, std::vector<int>* group) const {
    const CommRec* rec = find_comm(comm);
    if (!rec) return Err::invalid_handle;
    int me = tls_rank;
    if (me < 0 || me >= nranks) return Err::internal;
    if (rec->group.empty()) {  // self-like
      *my_comm_rank = 0;
      *group = {me};
      return Err::ok;
    }
    auto it = std::find(rec->group.begin(), rec->group.end(), me);
    if (it == rec->group.end()) return Err::invalid_arg;
    *my_comm_rank = static_cast<int>(it - rec->group.begin());
    *group = rec->group;
    return Err::ok;
  }

  Err byte_length(int count, int dtype, std::int64_t* bytes) const {
    auto it = types.find(dtype);
    if (it == types.end()) return Err::invalid_handle;
    if (!it->second.info.committed) return Err::not_committed;
    if (count < 0) return Err::invalid_arg;
    *bytes = count * it->second.info.extent;
    return Err::ok;
  }

  // Called with mu held.  Tries to pair a newly arrived message with the
  // oldest matching posted receive; returns true if delivered.
  bool deliver_to_posted(int comm, Msg&& msg) {
    CommQueues& q = queues[comm];
    for (auto it = q.posted.begin(); it != q.posted.end(); ++it) {
      if (it->dst_world != msg.dst_world) continue;
      if (it->src_world_sel != kAnySource && it->src_world_sel != msg.src_world)
        continue;
      if (it->tag_sel != kAnyTag && it->tag_sel != msg.tag) continue;
      complete_recv(reqs[it->req_id], it->buf, it->capacity, msg);
      q.posted.erase(it);
      cv.notify_all();
      return true;
    }
    q.unexpected.push_back(std::move(msg));
    return false;
  }

  void complete_recv(ReqRec& req, void* buf, std::int64_t capacity, const Msg& msg) {
    std::int64_t n = static_cast<std::int64_t>(msg.payload.size());
    std::int64_t copied = std::min(n, capacity);
    if (copied > 0) std::memcpy(buf, msg.payload.data(), copied);
    req.status.source = msg.src_comm_rank;
    req.status.tag = msg.tag;
    req.status.error = n > capacity ? static_cast<int>(Err::truncate) : 0;
    req.status.count_bytes = copied;
    req.complete = true;
  }
};

Engine::Engine(int nranks, unsigned seed) : nranks_(nranks) {
  if (nranks < 1) throw std::invalid_argument("engine needs at least one rank");
  impl_ = std::make_unique<Impl>();
  impl_->nranks = nranks;
  impl_->seed = seed;
  std::vector<int> world(nranks);
  for (int i = 0; i < nranks; ++i) world[i] = i;
  impl_->comms[kCommWorld] = CommRec{world, 0, 0, true};
  impl_->comms[kCommSelf] = CommRec{{}, 0, 0, true};
}

Engine::~Engine() = default;

int Engine::current_rank() { return tls_rank; }

void Engine::run(std::vector<std::function<void()>> programs) {
  if (static_cast<int>(programs.size()) != nranks_)
    throw std::invalid_argument("need one program per rank");
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(programs.size());
  for (int r = 0; r < nranks_; ++r) {
    threads.emplace_back([&, r] {
      ScopedRank guard(r);
      try {
        programs[r]();
      } catch (...) {
        errors[r] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// -- datatypes --

int Engine::register_builtin_type(std::int64_t byte_size, NumKind kind) {
  std::lock_guard lock(impl_->mu);
  int id = impl_->next_type++;
  impl_->types[id] = TypeRec{TypeInfo{byte_size, kind, true, true}, 0, 0};
  return id;
}

Err Engine::type_contiguous(int count, int base, int* out) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->types.find(base);
  if (it == impl_->types.end()) return Err::invalid_handle;
  if (count < 0) return Err::invalid_arg;
  int id = impl_->next_type++;
  impl_->types[id] = TypeRec{
      TypeInfo{count * it->second.info.extent, it->second.info.kind, false, false},
      base, count};
  *out = id;
  return Err::ok;
}

Err Engine::type_commit(int dtype) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->types.find(dtype);
  if (it == impl_->types.end()) return Err::invalid_handle;
  it->second.info.committed = true;
  return Err::ok;
}

Err Engine::type_free(int dtype) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->types.find(dtype);
  if (it == impl_->types.end()) return Err::invalid_handle;
  if (it->second.info.builtin) return Err::invalid_arg;
  impl_->types.erase(it);
  return Err::ok;
}

Err Engine::type_extent(int dtype, std::int64_t* extent) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->types.find(dtype);
  if (it == impl_->types.end()) return Err::invalid_handle;
  *extent = it->second.info.extent;
  return Err::ok;
}

Err Engine::type_info(int dtype, TypeInfo* info) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->types.find(dtype);
  if (it == impl_->types.end()) return Err::invalid_handle;
  *info = it->second.info;
  return Err::ok;
}

// -- ops --

int Engine::register_op(OpFn fn, bool commutative) {
  std::lock_guard lock(impl_->mu);
  int id = impl_->next_op++;
  impl_->ops[id] = OpRec{std::move(fn), commutative};
  return id;
}

Err Engine::op_free(int op) {
  std::lock_guard lock(impl_->mu);
  if (impl_->ops.erase(op) == 0) return Err::invalid_handle;
  return Err::ok;
}

// -- communicators --

Err Engine::comm_size(int comm, int* size) const {
  std::lock_guard lock(impl_->mu);
  const CommRec* rec = impl_->find_comm(comm);
  if (!rec) return Err::invalid_handle;
  *size = rec->group.empty() ? 1 : static_cast<int>(rec->group.size());
  return Err::ok;
}

Err Engine::comm_rank(int comm, int* rank) const {
  std::lock_guard lock(impl_->mu);
  int me;
  std::vector<int> group;
  Err e = impl_->resolve(comm, &me, &group);
  if (e != Err::ok) return e;
  *rank = me;
  return Err::ok;
}

Err Engine::comm_dup(int comm, int* newcomm) {
  std::lock_guard lock(impl_->mu);
  const CommRec* rec = impl_->find_comm(comm);
  if (!rec) return Err::invalid_handle;
  auto& counts = impl_->dup_counts[comm];
  counts.resize(impl_->nranks, 0);
  long k = counts[tls_rank]++;
  auto key = std::make_pair(comm, k);
  auto it = impl_->dup_ids.find(key);
  if (it == impl_->dup_ids.end()) {
    int id = impl_->next_comm++;
    CommRec dup;
    dup.group = rec->group;
    dup.expected_frees = rec->group.empty() ? impl_->nranks
                                            : static_cast<int>(rec->group.size());
    impl_->comms[id] = std::move(dup);
    it = impl_->dup_ids.emplace(key, id).first;
  }
  *newcomm = it->second;
  return Err::ok;
}

Err Engine::comm_free(int comm) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->comms.find(comm);
  if (it == impl_->comms.end()) return Err::invalid_handle;
  if (it->second.predefined) return Err::invalid_arg;
  if (++it->second.frees >= it->second.expected_frees) {
    impl_->comms.erase(it);
    impl_->queues.erase(comm);
    impl_->coll_counts.erase(comm);
    impl_->dup_counts.erase(comm);
  }
  return Err::ok;
}

// -- point to point --

Err Engine::isend(int comm, int dest, int tag, const void* buf, int count,
                  int dtype, int* request) {
  std::lock_guard lock(impl_->mu);
  int me;
  std::vector<int> group;
  Err e = impl_->resolve(comm, &me, &group);
  if (e != Err::ok) return e;
  if (dest < 0 || dest >= static_cast<int>(group.size())) return Err::invalid_arg;
  if (tag < 0) return Err::invalid_arg;
  std::int64_t bytes;
  e = impl_->byte_length(count, dtype, &bytes);
  if (e != Err::ok) return e;

  Msg msg;
  msg.src_world = tls_rank;
  msg.dst_world = group[dest];
  msg.tag = tag;
  msg.src_comm_rank = me;
  msg.payload.assign(static_cast<const std::byte*>(buf),
                     static_cast<const std::byte*>(buf) + bytes);
  impl_->deliver_to_posted(comm, std::move(msg));

  // Buffered semantics: the send completes at once.
  int id = impl_->next_req++;
  ReqRec rec;
  rec.complete = true;
  impl_->reqs[id] = rec;
  *request = id;
  return Err::ok;
}

Err Engine::send(int comm, int dest, int tag, const void* buf, int count,
                 int dtype) {
  int req;
  Err e = isend(comm, dest, tag, buf, count, dtype, &req);
  if (e != Err::ok) return e;
  StatusPayload st;
  return wait(req, &st);
}

Err Engine::irecv(int comm, int source, int tag, void* buf, int count, int dtype,
                  int* request) {
  std::lock_guard lock(impl_->mu);
  int me;
  std::vector<int> group;
  Err e = impl_->resolve(comm, &me, &group);
  if (e != Err::ok) return e;
  int src_world_sel = kAnySource;
  if (source != kAnySource) {
    if (source < 0 || source >= static_cast<int>(group.size()))
      return Err::invalid_arg;
    src_world_sel = group[source];
  }
  if (tag != kAnyTag && tag < 0) return Err::invalid_arg;
  std::int64_t capacity;
  e = impl_->byte_length(count, dtype, &capacity);
  if (e != Err::ok) return e;

  int id = impl_->next_req++;
  ReqRec& rec = impl_->reqs[id];
  *request = id;

  CommQueues& q = impl_->queues[comm];
  for (auto it = q.unexpected.begin(); it != q.unexpected.end(); ++it) {
    if (it->dst_world != tls_rank) continue;
    if (src_world_sel != kAnySource && src_world_sel != it->src_world) continue;
    if (tag != kAnyTag && tag != it->tag) continue;
    impl_->complete_recv(rec, buf, capacity, *it);
    q.unexpected.erase(it);
    return Err::ok;
  }
  q.posted.push_back(Posted{id, tls_rank, src_world_sel, tag, buf, capacity});
  return Err::ok;
}

Err Engine::recv(int comm, int source, int tag, void* buf, int count, int dtype,
                 StatusPayload* status) {
  int req;
  Err e = irecv(comm, source, tag, buf, count, dtype, &req);
  if (e != Err::ok) return e;
  return wait(req, status);
}

// -- request completion --

Err Engine::wait(int request, StatusPayload* status) {
  std::unique_lock lock(impl_->mu);
  auto it = impl_->reqs.find(request);
  if (it == impl_->reqs.end()) return Err::invalid_handle;
  impl_->cv.wait(lock, [&] { return it->second.complete; });
  StatusPayload st = it->second.status;
  impl_->reqs.erase(it);
  if (status) *status = st;
  return st.error == 0 ? Err::ok : static_cast<Err>(st.error);
}

Err Engine::test(int request, bool* flag, StatusPayload* status) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->reqs.find(request);
  if (it == impl_->reqs.end()) return Err::invalid_handle;
  if (!it->second.complete) {
    *flag = false;
    return Err::ok;
  }
  *flag = true;
  StatusPayload st = it->second.status;
  impl_->reqs.erase(it);
  if (status) *status = st;
  return st.error == 0 ? Err::ok : static_cast<Err>(st.error);
}

Err Engine::waitall(std::span<const int> requests, std::span<StatusPayload> statuses) {
  if (statuses.size() < requests.size()) return Err::invalid_arg;
  Err worst = Err::ok;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    Err e = wait(requests[i], &statuses[i]);
    if (e != Err::ok) worst = e;
  }
  return worst;
}

Err Engine::testall(std::span<const int> requests, bool* flag,
                    std::span<StatusPayload> statuses) {
  if (statuses.size() < requests.size()) return Err::invalid_arg;
  {
    std::lock_guard lock(impl_->mu);
    for (int r : requests) {
      auto it = impl_->reqs.find(r);
      if (it == impl_->reqs.end()) return Err::invalid_handle;
      if (!it->second.complete) {
        *flag = false;
        return Err::ok;
      }
    }
  }
  *flag = true;
  return waitall(requests, statuses);
}

Err Engine::get_status(int request, bool* complete, StatusPayload* status) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->reqs.find(request);
  if (it == impl_->reqs.end()) return Err::invalid_handle;
  *complete = it->second.complete;
  if (it->second.complete && status) *status = it->second.status;
  return Err::ok;
}

Err Engine::request_free(int request) {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->reqs.find(request);
  if (it == impl_->reqs.end()) return Err::invalid_handle;
  if (!it->second.complete) return Err::pending;
  impl_->reqs.erase(it);
  return Err::ok;
}

Err Engine::get_count(const StatusPayload& status, int dtype,
                      std::int64_t* count) const {
  std::int64_t extent;
  Err e = type_extent(dtype, &extent);
  if (e != Err::ok) return e;
  if (extent <= 0 || status.count_bytes % extent != 0) {
    *count = kCountUndefined;
    return Err::ok;
  }
  *count = status.count_bytes / extent;
  return Err::ok;
}

// -- collectives --

Err Engine::reduce(int comm, int root, const void* sendbuf, void* recvbuf,
                   int count, int dtype, int op) {
  OpFn fn;
  int expected;
  int my_rank;
  CollRec* rec;
  std::pair<int, long> key;
  {
    std::unique_lock lock(impl_->mu);
    std::vector<int> group;
    Err e = impl_->resolve(comm, &my_rank, &group);
    if (e != Err::ok) return e;
    expected = static_cast<int>(group.size());
    if (root != -1 && (root < 0 || root >= expected)) return Err::invalid_arg;
    auto tit = impl_->types.find(dtype);
    if (tit == impl_->types.end()) return Err::invalid_handle;
    if (!tit->second.info.committed) return Err::not_committed;
    auto oit = impl_->ops.find(op);
    if (oit == impl_->ops.end()) return Err::invalid_handle;
    fn = oit->second.fn;

    auto& counts = impl_->coll_counts[comm];
    counts.resize(impl_->nranks, 0);
    long k = counts[tls_rank]++;
    // Self-like communicators rendezvous per rank.
    key = {comm, impl_->find_comm(comm)->group.empty()
                     ? k * impl_->nranks + tls_rank
                     : k};
    rec = &impl_->colls[key];
    if (rec->arrived == 0) {
      rec->kind = CollRec::Reduce;
      rec->expected = expected;
      rec->contribs.resize(expected);
      rec->outs.resize(expected);
      rec->count = count;
      rec->dtype = dtype;
      rec->op = op;
      rec->root = root;
    }
    rec->contribs[my_rank] = sendbuf;
    rec->outs[my_rank] = recvbuf;
    rec->arrived++;

    if (rec->arrived < rec->expected) {
      impl_->cv.wait(lock, [&] { return rec->done; });
      Err err = rec->err;
      if (++rec->departed == rec->expected) impl_->colls.erase(key);
      return err;
    }
  }

  // Last arriver: deterministic left-to-right fold, engine lock released so
  // user callbacks run without engine-internal exclusivity.
  std::int64_t extent;
  type_extent(dtype, &extent);
  std::vector<std::byte> acc(static_cast<std::size_t>(count) * extent);
  {
    std::unique_lock lock(impl_->mu);
    if (acc.size() > 0 && rec->contribs[0])
      std::memcpy(acc.data(), rec->contribs[0], acc.size());
  }
  for (int i = 1; i < expected; ++i) fn(rec->contribs[i], acc.data(), count, dtype);

  std::unique_lock lock(impl_->mu);
  for (int i = 0; i < expected; ++i) {
    if (rec->root != -1 && i != rec->root) continue;
    if (rec->outs[i] && !acc.empty()) std::memcpy(rec->outs[i], acc.data(), acc.size());
  }
  rec->done = true;
  impl_->cv.notify_all();
  Err err = rec->err;
  if (++rec->departed == rec->expected) impl_->colls.erase(key);
  return err;
}

Err Engine::allreduce(int comm, const void* sendbuf, void* recvbuf, int count,
                      int dtype, int op) {
  return reduce(comm, -1, sendbuf, recvbuf, count, dtype, op);
}

Err Engine::ialltoallw(int comm, const void* sendbuf,
                       std::span<const int> sendcounts,
                       std::span<const std::int64_t> senddispls,
                       std::span<const int> sendtypes, void* recvbuf,
                       std::span<const int> recvcounts,
                       std::span<const std::int64_t> recvdispls,
                       std::span<const int> recvtypes, int* request) {
  std::lock_guard lock(impl_->mu);
  int my_rank;
  std::vector<int> group;
  Err e = impl_->resolve(comm, &my_rank, &group);
  if (e != Err::ok) return e;
  std::size_t n = group.size();
  if (sendcounts.size() != n || senddispls.size() != n || sendtypes.size() != n ||
      recvcounts.size() != n || recvdispls.size() != n || recvtypes.size() != n)
    return Err::invalid_arg;
  for (std::size_t i = 0; i < n; ++i) {
    for (int t : {sendtypes[i], recvtypes[i]}) {
      auto it = impl_->types.find(t);
      if (it == impl_->types.end()) return Err::invalid_handle;
      if (!it->second.info.committed) return Err::not_committed;
    }
  }

  auto& counts = impl_->coll_counts[comm];
  counts.resize(impl_->nranks, 0);
  long k = counts[tls_rank]++;
  std::pair<int, long> key = {
      comm, impl_->find_comm(comm)->group.empty() ? k * impl_->nranks + tls_rank : k};
  CollRec& rec = impl_->colls[key];
  if (rec.arrived == 0) {
    rec.kind = CollRec::Alltoallw;
    rec.expected = static_cast<int>(n);
    rec.a2a.resize(n);
    rec.a2a_present.resize(n, false);
  }
  RankArgsA2A& mine = rec.a2a[my_rank];
  mine.sendbuf = sendbuf;
  mine.recvbuf = recvbuf;
  mine.scounts.assign(sendcounts.begin(), sendcounts.end());
  mine.sdispls.assign(senddispls.begin(), senddispls.end());
  mine.stypes.assign(sendtypes.begin(), sendtypes.end());
  mine.rcounts.assign(recvcounts.begin(), recvcounts.end());
  mine.rdispls.assign(recvdispls.begin(), recvdispls.end());
  mine.rtypes.assign(recvtypes.begin(), recvtypes.end());
  int id = impl_->next_req++;
  mine.req_id = id;
  impl_->reqs[id];  // pending
  rec.a2a_present[my_rank] = true;
  rec.arrived++;
  *request = id;

  if (rec.arrived == rec.expected) {
    // Exchange: receiver i's block j comes from sender j's block i.
    for (int i = 0; i < rec.expected; ++i) {
      RankArgsA2A& ri = rec.a2a[i];
      std::int64_t total = 0;
      Err status_err = Err::ok;
      for (int j = 0; j < rec.expected; ++j) {
        RankArgsA2A& sj = rec.a2a[j];
        std::int64_t sext = impl_->types[sj.stypes[i]].info.extent;
        std::int64_t rext = impl_->types[ri.rtypes[j]].info.extent;
        std::int64_t sbytes = sj.scounts[i] * sext;
        std::int64_t rbytes = ri.rcounts[j] * rext;
        std::int64_t copied = std::min(sbytes, rbytes);
        if (copied > 0)
          std::memcpy(static_cast<std::byte*>(ri.recvbuf) + ri.rdispls[j],
                      static_cast<const std::byte*>(sj.sendbuf) + sj.sdispls[i],
                      copied);
        if (sbytes > rbytes) status_err = Err::truncate;
        total += copied;
      }
      ReqRec& req = impl_->reqs[ri.req_id];
      req.status.source = i;
      req.status.error = static_cast<int>(status_err);
      req.status.count_bytes = total;
      req.complete = true;
    }
    impl_->colls.erase(key);
    impl_->cv.notify_all();
  }
  return Err::ok;
}

// -- predefined reduction kernels --

namespace {

template <typename T>
void combine_arith(PredefOp code, const T* in, T* inout, int n) {
  switch (code) {
    case PredefOp::Sum:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>(in[i] + inout[i]);
      break;
    case PredefOp::Prod:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>(in[i] * inout[i]);
      break;
    case PredefOp::Min:
      for (int i = 0; i < n; ++i) inout[i] = std::min(in[i], inout[i]);
      break;
    case PredefOp::Max:
      for (int i = 0; i < n; ++i) inout[i] = std::max(in[i], inout[i]);
      break;
    default:
      throw std::domain_error("not an arithmetic op");
  }
}

template <typename T>
void combine_bitwise(PredefOp code, const T* in, T* inout, int n) {
  switch (code) {
    case PredefOp::Band:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>(in[i] & inout[i]);
      break;
    case PredefOp::Bor:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>(in[i] | inout[i]);
      break;
    case PredefOp::Bxor:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>(in[i] ^ inout[i]);
      break;
    case PredefOp::Land:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>((in[i] != 0) && (inout[i] != 0));
      break;
    case PredefOp::Lor:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>((in[i] != 0) || (inout[i] != 0));
      break;
    case PredefOp::Lxor:
      for (int i = 0; i < n; ++i) inout[i] = static_cast<T>((in[i] != 0) != (inout[i] != 0));
      break;
    default:
      throw std::domain_error("not a bitwise op");
  }
}

template <typename T>
void combine(PredefOp code, const void* in, void* inout, int n) {
  const T* a = static_cast<const T*>(in);
  T* b = static_cast<T*>(inout);
  if constexpr (std::is_floating_point_v<T>) {
    combine_arith(code, a, b, n);
  } else {
    switch (code) {
      case PredefOp::Sum:
      case PredefOp::Prod:
      case PredefOp::Min:
      case PredefOp::Max:
        combine_arith(code, a, b, n);
        break;
      default:
        combine_bitwise(code, a, b, n);
    }
  }
}

}  // namespace

OpFn make_predefined_op(PredefOp code, Engine& engine) {
  if (code == PredefOp::NoOp)
    return [](const void*, void*, int, int) {};
  if (code == PredefOp::Replace)
    return [&engine](const void* in, void* inout, int count, int dtype) {
      std::int64_t extent = 0;
      if (engine.type_extent(dtype, &extent) != Err::ok)
        throw std::domain_error("replace: bad datatype");
      std::memcpy(inout, in, static_cast<std::size_t>(count) * extent);
    };
  if (code == PredefOp::Minloc || code == PredefOp::Maxloc)
    return [](const void*, void*, int, int) {
      throw std::domain_error("minloc/maxloc need pair datatypes, not modeled");
    };

  return [code, &engine](const void* in, void* inout, int count, int dtype) {
    TypeInfo info;
    if (engine.type_info(dtype, &info) != Err::ok)
      throw std::domain_error("reduction on unknown datatype");
    bool is_float = info.kind == NumKind::Float;
    bool is_signed = info.kind == NumKind::Int;
    if (is_float && code != PredefOp::Sum && code != PredefOp::Prod &&
        code != PredefOp::Min && code != PredefOp::Max)
      throw std::domain_error("bitwise/logical reduction on a float type");
    switch (info.extent) {
      case 1:
        is_signed ? combine<std::int8_t>(code, in, inout, count)
                  : combine<std::uint8_t>(code, in, inout, count);
        break;
      case 2:
        is_signed ? combine<std::int16_t>(code, in, inout, count)
                  : combine<std::uint16_t>(code, in, inout, count);
        break;
      case 4:
        if (is_float) combine<float>(code, in, inout, count);
        else if (is_signed) combine<std::int32_t>(code, in, inout, count);
        else combine<std::uint32_t>(code, in, inout, count);
        break;
      case 8:
        if (is_float) combine<double>(code, in, inout, count);
        else if (is_signed) combine<std::int64_t>(code, in, inout, count);
        else combine<std::uint64_t>(code, in, inout, count);
        break;
      default:
        throw std::domain_error("predefined reduction on non-scalar extent");
    }
  };
}

}  // namespace mpiabi::sim
