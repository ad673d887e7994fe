#include "mpiabi/shim.hpp"

#include <array>
#include <atomic>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "mpiabi/constants.hpp"

namespace mpiabi::shim {

namespace {

namespace c = constants;
using backend::BackendApi;
using backend::BackendDescriptor;
using backend::NativeHandle;

// Standard null-handle values the shim writes back after frees/completions.
constexpr HandleValue kStdOpNull = 0x020;
constexpr HandleValue kStdCommNull = 0x100;
constexpr HandleValue kStdRequestNull = 0x120;
constexpr HandleValue kStdDatatypeNull = 0x200;

int kind_error(HandleKind kind) {
  switch (kind) {
    case HandleKind::Comm: return c::ERR_COMM;
    case HandleKind::Datatype: return c::ERR_TYPE;
    case HandleKind::Op: return c::ERR_OP;
    case HandleKind::Request: return c::ERR_REQUEST;
    default: return c::ERR_ARG;
  }
}

}  // namespace

struct Shim::Impl {
  std::shared_ptr<BackendApi> backend;
  const BackendDescriptor* desc = nullptr;
  std::atomic<bool> initialized{false};

  // Direct-indexed predefined conversion: standard value -> native handle,
  // with the handle kind alongside for O(1) kind checking.  Index 0 stays
  // empty: value 0 is never valid.
  std::array<NativeHandle, kPredefinedRegionEnd> to_native_table{};
  std::array<std::int8_t, kPredefinedRegionEnd> kind_table{};  // kind+1, 0 = absent

  mutable std::mutex mu;
  struct DynEntry {
    int refs = 1;
  };
  // User-space handles pass through numerically (native user handles are
  // >= 1024, outside the predefined region); the map tracks liveness.
  std::unordered_map<HandleValue, DynEntry> dynamic;
  // Converted native datatype arrays that must outlive an in-flight
  // ialltoallw, keyed by the standard request value.
  struct RequestVectors {
    std::vector<NativeHandle> sendtypes;
    std::vector<NativeHandle> recvtypes;
  };
  std::unordered_map<HandleValue, RequestVectors> request_state;

  NativeHandle native_request_null = 0;

  void build_tables() {
    to_native_table.fill(0);
    kind_table.fill(0);
    for (const auto& [std_value, native] : desc->std_to_native) {
      HandleClassification cls = classify_handle(std_value);
      to_native_table[std_value] = native;
      kind_table[std_value] = static_cast<std::int8_t>(*cls.kind) + 1;
    }
    native_request_null = desc->std_to_native.at(kStdRequestNull);
  }

  int to_native(AbiHandle h, HandleKind kind, NativeHandle* out) const {
    HandleValue v = h.value;
    if (v == 0) return kind_error(kind);
    if (v > 0 && v < kPredefinedRegionEnd) {
      if (kind_table[v] != static_cast<std::int8_t>(kind) + 1)
        return kind_error(kind);
      *out = to_native_table[v];
      return 0;
    }
    std::lock_guard lock(mu);
    if (!dynamic.contains(v)) return kind_error(kind);
    *out = v;
    return 0;
  }

  // Adopts a native handle returned by the backend.  Predefined handles map
  // through the descriptor; user handles pass through and gain (or bump) a
  // dynamic-map entry.
  HandleValue adopt_native(NativeHandle n) {
    auto it = desc->native_to_std.find(n);
    if (it != desc->native_to_std.end()) return it->second;
    std::lock_guard lock(mu);
    auto [entry, inserted] = dynamic.try_emplace(n);
    if (!inserted) entry->second.refs++;
    return n;
  }

  // Read-only native -> standard view, for callback arguments.
  HandleValue peek_native(NativeHandle n) const {
    auto it = desc->native_to_std.find(n);
    return it != desc->native_to_std.end() ? it->second : n;
  }

  void release_dynamic(HandleValue v) {
    if (v > 0 && v < kPredefinedRegionEnd) return;
    std::lock_guard lock(mu);
    auto it = dynamic.find(v);
    if (it != dynamic.end() && --it->second.refs == 0) dynamic.erase(it);
  }

  int class_of_native(int rc) const {
    if (rc == 0) return 0;
    auto it = desc->native_to_class.find(rc);
    return it != desc->native_to_class.end() ? it->second : c::ERR_OTHER;
  }

  int native_of_class(int cls) const {
    if (cls == 0) return 0;
    auto it = desc->class_to_native.find(cls);
    return it != desc->class_to_native.end() ? it->second : 0;
  }

  void status_from_native(const void* bytes, AbiStatus* out) const {
    if (!out) return;
    sim::StatusPayload p =
        backend::unpack_native_status(desc->status_layout, bytes);
    out->set_source(p.source);
    out->set_tag(p.tag);
    out->set_error(class_of_native(p.error));
    out->set_count(static_cast<std::uint64_t>(p.count_bytes));
    out->set_cancelled(p.cancelled);
  }

  void status_to_native(const AbiStatus& in, void* bytes) const {
    sim::StatusPayload p;
    p.source = in.source();
    p.tag = in.tag();
    p.error = native_of_class(in.error());
    p.count_bytes = in.count();
    p.cancelled = in.cancelled();
    backend::pack_native_status(desc->status_layout, p, bytes);
  }

  // Scratch native status bytes, large enough for either layout.
  using NativeStatusBuf = std::array<std::byte, 24>;

  // Common post-completion handling for wait/test: the backend has set the
  // native request to its null; mirror that on the standard side and drop
  // per-request state.
  void complete_request(AbiHandle* request) {
    HandleValue old = request->value;
    request->value = kStdRequestNull;
    if (old == kStdRequestNull) return;
    release_dynamic(old);
    std::lock_guard lock(mu);
    request_state.erase(old);
  }
};

Shim::Shim() : impl_(std::make_unique<Impl>()) {}
Shim::~Shim() = default;

int Shim::init(std::string_view backend_name, sim::Engine& engine) {
  if (impl_->initialized.load()) return c::ERR_OTHER;
  std::shared_ptr<BackendApi> b;
  try {
    b = backend::backend_registry_get(backend_name, engine);
  } catch (const std::out_of_range&) {
    return c::ERR_ARG;
  }
  int rc = b->init();
  if (rc != 0) return c::ERR_OTHER;
  impl_->backend = std::move(b);
  impl_->desc = &impl_->backend->descriptor();
  impl_->build_tables();
  impl_->initialized.store(true);
  return 0;
}

namespace {
// Trampoline contexts for user reduction callbacks.  The native callback
// interface carries no user-data pointer, only the op handle being applied,
// so contexts are keyed by native op handle in a process-wide registry
// consulted inside one fixed dispatcher.
struct TrampolineEntry {
  UserOpFn fn;
  Shim::Impl* owner;
};
std::mutex g_tramp_mu;
std::unordered_map<NativeHandle, TrampolineEntry> g_trampolines;

void op_dispatcher(const void* in, void* inout, int count, NativeHandle dtype,
                   NativeHandle op) {
  UserOpFn fn;
  Shim::Impl* owner;
  {
    std::lock_guard lock(g_tramp_mu);
    auto it = g_trampolines.find(op);
    if (it == g_trampolines.end()) return;
    fn = it->second.fn;
    owner = it->second.owner;
  }
  fn(in, inout, count, AbiHandle{owner->peek_native(dtype)});
}
}  // namespace

int Shim::finalize() {
  if (!impl_->initialized.load()) return c::ERR_OTHER;
  impl_->initialized.store(false);
  {
    std::lock_guard lock(g_tramp_mu);
    std::erase_if(g_trampolines,
                  [&](const auto& kv) { return kv.second.owner == impl_.get(); });
  }
  int rc = impl_->backend->finalize();
  impl_->backend.reset();
  impl_->desc = nullptr;
  return rc == 0 ? 0 : c::ERR_OTHER;
}

bool Shim::initialized() const { return impl_->initialized.load(); }

std::string Shim::library_version() const { return "libmpi_abi 1.0.0"; }

std::string_view Shim::backend_name() const {
  return impl_->initialized.load() ? impl_->desc->name : std::string_view{};
}

#define SHIM_REQUIRE_INIT() \
  if (!impl_->initialized.load()) return c::ERR_OTHER

int Shim::comm_size(AbiHandle comm, int* size) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  return impl_->class_of_native(impl_->backend->comm_size(nc, size));
}

int Shim::comm_rank(AbiHandle comm, int* rank) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  return impl_->class_of_native(impl_->backend->comm_rank(nc, rank));
}

int Shim::comm_dup(AbiHandle comm, AbiHandle* newcomm) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  NativeHandle nnew;
  int rc = impl_->backend->comm_dup(nc, &nnew);
  if (rc != 0) return impl_->class_of_native(rc);
  newcomm->value = impl_->adopt_native(nnew);
  return 0;
}

int Shim::comm_free(AbiHandle* comm) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc;
  if (int rc = impl_->to_native(*comm, HandleKind::Comm, &nc)) return rc;
  int rc = impl_->backend->comm_free(&nc);
  if (rc != 0) return impl_->class_of_native(rc);
  impl_->release_dynamic(comm->value);
  comm->value = kStdCommNull;
  return 0;
}

int Shim::send(const void* buf, int count, AbiHandle dtype, int dest, int tag,
               AbiHandle comm) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  return impl_->class_of_native(
      impl_->backend->send(buf, count, nt, dest, tag, nc));
}

int Shim::recv(void* buf, int count, AbiHandle dtype, int source, int tag,
               AbiHandle comm, AbiStatus* status) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  int src = source == c::ANY_SOURCE ? static_cast<int>(impl_->desc->native_any_source) : source;
  int tg = tag == c::ANY_TAG ? static_cast<int>(impl_->desc->native_any_tag) : tag;
  Impl::NativeStatusBuf bytes{};
  int rc = impl_->backend->recv(buf, count, nt, src, tg, nc,
                                status ? bytes.data() : nullptr);
  if (status) impl_->status_from_native(bytes.data(), status);
  return impl_->class_of_native(rc);
}

int Shim::isend(const void* buf, int count, AbiHandle dtype, int dest, int tag,
                AbiHandle comm, AbiHandle* request) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  NativeHandle nreq;
  int rc = impl_->backend->isend(buf, count, nt, dest, tag, nc, &nreq);
  if (rc != 0) return impl_->class_of_native(rc);
  request->value = impl_->adopt_native(nreq);
  return 0;
}

int Shim::irecv(void* buf, int count, AbiHandle dtype, int source, int tag,
                AbiHandle comm, AbiHandle* request) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  int src = source == c::ANY_SOURCE ? static_cast<int>(impl_->desc->native_any_source) : source;
  int tg = tag == c::ANY_TAG ? static_cast<int>(impl_->desc->native_any_tag) : tag;
  NativeHandle nreq;
  int rc = impl_->backend->irecv(buf, count, nt, src, tg, nc, &nreq);
  if (rc != 0) return impl_->class_of_native(rc);
  request->value = impl_->adopt_native(nreq);
  return 0;
}

int Shim::wait(AbiHandle* request, AbiStatus* status) {
  SHIM_REQUIRE_INIT();
  NativeHandle nreq;
  if (int rc = impl_->to_native(*request, HandleKind::Request, &nreq)) return rc;
  Impl::NativeStatusBuf bytes{};
  int rc = impl_->backend->wait(&nreq, status ? bytes.data() : nullptr);
  if (status) impl_->status_from_native(bytes.data(), status);
  if (nreq == impl_->native_request_null) impl_->complete_request(request);
  return impl_->class_of_native(rc);
}

int Shim::test(AbiHandle* request, int* flag, AbiStatus* status) {
  SHIM_REQUIRE_INIT();
  NativeHandle nreq;
  if (int rc = impl_->to_native(*request, HandleKind::Request, &nreq)) return rc;
  Impl::NativeStatusBuf bytes{};
  int rc = impl_->backend->test(&nreq, flag, status ? bytes.data() : nullptr);
  if (*flag && status) impl_->status_from_native(bytes.data(), status);
  if (nreq == impl_->native_request_null) impl_->complete_request(request);
  return impl_->class_of_native(rc);
}

int Shim::waitall(int n, AbiHandle* requests, AbiStatus* statuses) {
  SHIM_REQUIRE_INIT();
  int worst = 0;
  for (int i = 0; i < n; ++i) {
    int rc = wait(&requests[i], statuses ? &statuses[i] : nullptr);
    if (rc != 0) worst = rc;
  }
  return worst;
}

int Shim::testall(int n, AbiHandle* requests, int* flag, AbiStatus* statuses) {
  SHIM_REQUIRE_INIT();
  // No cached conversions: each entry is translated on every call.
  std::vector<NativeHandle> natives(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (int rc = impl_->to_native(requests[i], HandleKind::Request, &natives[i]))
      return rc;
  }
  int sz = impl_->desc->status_layout.size_bytes;
  std::vector<std::byte> bytes(statuses ? static_cast<std::size_t>(n) * sz : 0);
  int rc = impl_->backend->testall(n, natives.data(), flag,
                                   statuses ? bytes.data() : nullptr);
  if (rc != 0) return impl_->class_of_native(rc);
  if (*flag) {
    for (int i = 0; i < n; ++i) {
      if (statuses) impl_->status_from_native(bytes.data() + i * sz, &statuses[i]);
      if (natives[i] == impl_->native_request_null)
        impl_->complete_request(&requests[i]);
    }
  }
  return 0;
}

int Shim::get_count(const AbiStatus& status, AbiHandle dtype,
                    std::int64_t* count) {
  SHIM_REQUIRE_INIT();
  NativeHandle nt;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  Impl::NativeStatusBuf bytes{};
  impl_->status_to_native(status, bytes.data());
  std::int64_t n;
  int rc = impl_->backend->get_count(bytes.data(), nt, &n);
  if (rc != 0) return impl_->class_of_native(rc);
  *count = n == impl_->desc->native_undefined ? c::UNDEFINED : n;
  return 0;
}

int Shim::type_size(AbiHandle dtype, std::int64_t* size) {
  SHIM_REQUIRE_INIT();
  NativeHandle nt;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  return impl_->class_of_native(impl_->backend->type_size(nt, size));
}

int Shim::type_contiguous(int count, AbiHandle base, AbiHandle* out) {
  SHIM_REQUIRE_INIT();
  NativeHandle nt;
  if (int rc = impl_->to_native(base, HandleKind::Datatype, &nt)) return rc;
  NativeHandle nnew;
  int rc = impl_->backend->type_contiguous(count, nt, &nnew);
  if (rc != 0) return impl_->class_of_native(rc);
  out->value = impl_->adopt_native(nnew);
  return 0;
}

int Shim::type_commit(AbiHandle* dtype) {
  SHIM_REQUIRE_INIT();
  NativeHandle nt;
  if (int rc = impl_->to_native(*dtype, HandleKind::Datatype, &nt)) return rc;
  return impl_->class_of_native(impl_->backend->type_commit(&nt));
}

int Shim::type_free(AbiHandle* dtype) {
  SHIM_REQUIRE_INIT();
  NativeHandle nt;
  if (int rc = impl_->to_native(*dtype, HandleKind::Datatype, &nt)) return rc;
  int rc = impl_->backend->type_free(&nt);
  if (rc != 0) return impl_->class_of_native(rc);
  impl_->release_dynamic(dtype->value);
  dtype->value = kStdDatatypeNull;
  return 0;
}

int Shim::op_create(UserOpFn fn, int commutative, AbiHandle* op) {
  SHIM_REQUIRE_INIT();
  if (!fn) return c::ERR_ARG;
  NativeHandle nop;
  int rc = impl_->backend->op_create(&op_dispatcher, commutative, &nop);
  if (rc != 0) return impl_->class_of_native(rc);
  {
    std::lock_guard lock(g_tramp_mu);
    g_trampolines[nop] = TrampolineEntry{std::move(fn), impl_.get()};
  }
  op->value = impl_->adopt_native(nop);
  return 0;
}

int Shim::op_free(AbiHandle* op) {
  SHIM_REQUIRE_INIT();
  NativeHandle nop;
  if (int rc = impl_->to_native(*op, HandleKind::Op, &nop)) return rc;
  int rc = impl_->backend->op_free(&nop);
  if (rc != 0) return impl_->class_of_native(rc);
  {
    std::lock_guard lock(g_tramp_mu);
    g_trampolines.erase(op->value);
  }
  impl_->release_dynamic(op->value);
  op->value = kStdOpNull;
  return 0;
}

int Shim::reduce(const void* sendbuf, void* recvbuf, int count, AbiHandle dtype,
                 AbiHandle op, int root, AbiHandle comm) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt, nop;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  if (int rc = impl_->to_native(op, HandleKind::Op, &nop)) return rc;
  return impl_->class_of_native(
      impl_->backend->reduce(sendbuf, recvbuf, count, nt, nop, root, nc));
}

int Shim::allreduce(const void* sendbuf, void* recvbuf, int count,
                    AbiHandle dtype, AbiHandle op, AbiHandle comm) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc, nt, nop;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  if (int rc = impl_->to_native(dtype, HandleKind::Datatype, &nt)) return rc;
  if (int rc = impl_->to_native(op, HandleKind::Op, &nop)) return rc;
  return impl_->class_of_native(
      impl_->backend->allreduce(sendbuf, recvbuf, count, nt, nop, nc));
}

int Shim::ialltoallw(const void* sendbuf, const int sendcounts[],
                     const std::int64_t senddispls[], const AbiHandle sendtypes[],
                     void* recvbuf, const int recvcounts[],
                     const std::int64_t recvdispls[], const AbiHandle recvtypes[],
                     AbiHandle comm, AbiHandle* request) {
  SHIM_REQUIRE_INIT();
  NativeHandle nc;
  if (int rc = impl_->to_native(comm, HandleKind::Comm, &nc)) return rc;
  int n;
  if (int rc = impl_->backend->comm_size(nc, &n); rc != 0)
    return impl_->class_of_native(rc);

  // The backend may consult these arrays until the request completes, so
  // they are kept alive in per-request state until then.
  Impl::RequestVectors vecs;
  vecs.sendtypes.resize(static_cast<std::size_t>(n));
  vecs.recvtypes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (int rc = impl_->to_native(sendtypes[i], HandleKind::Datatype,
                                  &vecs.sendtypes[i]))
      return rc;
    if (int rc = impl_->to_native(recvtypes[i], HandleKind::Datatype,
                                  &vecs.recvtypes[i]))
      return rc;
  }
  NativeHandle nreq;
  int rc = impl_->backend->ialltoallw(sendbuf, sendcounts, senddispls,
                                      vecs.sendtypes.data(), recvbuf, recvcounts,
                                      recvdispls, vecs.recvtypes.data(), nc, &nreq);
  if (rc != 0) return impl_->class_of_native(rc);
  request->value = impl_->adopt_native(nreq);
  {
    std::lock_guard lock(impl_->mu);
    impl_->request_state[request->value] = std::move(vecs);
  }
  return 0;
}

int Shim::error_string(int errorclass, std::string* out) {
  SHIM_REQUIRE_INIT();
  if (errorclass == c::SUCCESS) {
    *out = "MPI_SUCCESS";
    return 0;
  }
  for (const ConstantDef& def : standard_constant_table()) {
    if (def.family == ConstantFamily::ErrorClass && def.value == errorclass) {
      *out = std::string(def.name);
      return 0;
    }
  }
  return c::ERR_ARG;
}

std::size_t Shim::dynamic_map_size() const {
  std::lock_guard lock(impl_->mu);
  return impl_->dynamic.size();
}

std::size_t Shim::request_state_size() const {
  std::lock_guard lock(impl_->mu);
  return impl_->request_state.size();
}

}  // namespace mpiabi::shim
