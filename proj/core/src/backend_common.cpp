#include "backend_common.hpp"

#include <cstring>
#include <stdexcept>

namespace mpiabi::backend {

namespace {

using sim::NumKind;

constexpr StdDatatypeSpec kStdDatatypes[] = {
    // fixed-size rows
    {0x240, 1, NumKind::Int},   // MPI_INT8_T
    {0x241, 1, NumKind::Uint},  // MPI_UINT8_T
    {0x243, 1, NumKind::Int},   // MPI_CHAR
    {0x244, 1, NumKind::Int},   // MPI_SIGNED_CHAR
    {0x245, 1, NumKind::Uint},  // MPI_UNSIGNED_CHAR
    {0x247, 1, NumKind::Byte},  // MPI_BYTE
    {0x248, 2, NumKind::Int},   // MPI_INT16_T
    {0x249, 2, NumKind::Uint},  // MPI_UINT16_T
    {0x250, 4, NumKind::Int},   // MPI_INT32_T
    {0x251, 4, NumKind::Uint},  // MPI_UINT32_T
    {0x258, 8, NumKind::Int},   // MPI_INT64_T
    {0x259, 8, NumKind::Uint},  // MPI_UINT64_T
    // variable-size rows, at the host LP64 sizes
    {0x201, 8, NumKind::Int},   // MPI_AINT
    {0x202, 8, NumKind::Int},   // MPI_COUNT
    {0x203, 8, NumKind::Int},   // MPI_OFFSET
    {0x207, 1, NumKind::Byte},  // MPI_PACKED
    {0x208, 2, NumKind::Int},   // MPI_SHORT
    {0x209, 4, NumKind::Int},   // MPI_INT
    {0x20A, 8, NumKind::Int},   // MPI_LONG
    {0x20B, 8, NumKind::Int},   // MPI_LONG_LONG
    {0x20C, 2, NumKind::Uint},  // MPI_UNSIGNED_SHORT
    {0x20D, 4, NumKind::Uint},  // MPI_UNSIGNED_INT
    {0x20E, 8, NumKind::Uint},  // MPI_UNSIGNED_LONG
    {0x20F, 8, NumKind::Uint},  // MPI_UNSIGNED_LONG_LONG
    {0x210, 4, NumKind::Float}, // MPI_FLOAT
};

}  // namespace

std::span<const StdDatatypeSpec> std_datatype_specs() { return kStdDatatypes; }

sim::PredefOp predef_op_of(HandleValue std_value) {
  using sim::PredefOp;
  switch (std_value) {
    case 0x021: return PredefOp::Sum;
    case 0x022: return PredefOp::Min;
    case 0x023: return PredefOp::Max;
    case 0x024: return PredefOp::Prod;
    case 0x028: return PredefOp::Band;
    case 0x029: return PredefOp::Bor;
    case 0x02A: return PredefOp::Bxor;
    case 0x030: return PredefOp::Land;
    case 0x031: return PredefOp::Lor;
    case 0x032: return PredefOp::Lxor;
    case 0x038: return PredefOp::Minloc;
    case 0x039: return PredefOp::Maxloc;
    case 0x03C: return PredefOp::Replace;
    case 0x03D: return PredefOp::NoOp;
  }
  throw std::out_of_range("not a predefined op handle");
}

int sim_err_to_class(sim::Err e) {
  namespace c = constants;
  switch (e) {
    case sim::Err::ok: return c::SUCCESS;
    case sim::Err::truncate: return c::ERR_TRUNCATE;
    case sim::Err::invalid_handle: return c::ERR_ARG;
    case sim::Err::invalid_arg: return c::ERR_ARG;
    case sim::Err::not_committed: return c::ERR_TYPE;
    case sim::Err::pending: return c::ERR_PENDING;
    case sim::Err::internal: return c::ERR_INTERN;
  }
  return c::ERR_OTHER;
}

// -- status codecs --

void int_status_pack(const sim::StatusPayload& in, IntStyleStatus* out) {
  std::uint64_t count = static_cast<std::uint64_t>(in.count_bytes);
  out->count_lo = static_cast<std::int32_t>(static_cast<std::uint32_t>(count));
  std::uint32_t hi = static_cast<std::uint32_t>(count >> 32) & 0x7FFFFFFFu;
  out->count_hi_and_cancelled =
      static_cast<std::int32_t>((hi << 1) | (in.cancelled ? 1u : 0u));
  out->source = in.source;
  out->tag = in.tag;
  out->error = in.error;
}

sim::StatusPayload int_status_unpack(const IntStyleStatus& in) {
  sim::StatusPayload out;
  out.source = in.source;
  out.tag = in.tag;
  out.error = in.error;
  std::uint64_t lo = static_cast<std::uint32_t>(in.count_lo);
  std::uint64_t hi = static_cast<std::uint32_t>(in.count_hi_and_cancelled) >> 1;
  out.count_bytes = static_cast<std::int64_t>(lo | (hi << 32));
  out.cancelled = (in.count_hi_and_cancelled & 1) != 0;
  return out;
}

void token_status_pack(const sim::StatusPayload& in, TokenStyleStatus* out) {
  out->source = in.source;
  out->tag = in.tag;
  out->error = in.error;
  out->cancelled = in.cancelled ? 1 : 0;
  out->ucount = static_cast<std::uint64_t>(in.count_bytes);
}

sim::StatusPayload token_status_unpack(const TokenStyleStatus& in) {
  sim::StatusPayload out;
  out.source = in.source;
  out.tag = in.tag;
  out.error = in.error;
  out.cancelled = in.cancelled != 0;
  out.count_bytes = static_cast<std::int64_t>(in.ucount);
  return out;
}

sim::StatusPayload unpack_native_status(const NativeStatusLayout& layout,
                                        const void* bytes) {
  if (layout.style == StatusStyle::IntStyle) {
    IntStyleStatus s;
    std::memcpy(&s, bytes, sizeof(s));
    return int_status_unpack(s);
  }
  TokenStyleStatus s;
  std::memcpy(&s, bytes, sizeof(s));
  return token_status_unpack(s);
}

void pack_native_status(const NativeStatusLayout& layout,
                        const sim::StatusPayload& payload, void* bytes) {
  if (layout.style == StatusStyle::IntStyle) {
    IntStyleStatus s;
    int_status_pack(payload, &s);
    std::memcpy(bytes, &s, sizeof(s));
    return;
  }
  TokenStyleStatus s;
  token_status_pack(payload, &s);
  std::memcpy(bytes, &s, sizeof(s));
}

// -- SimBackendBase --

SimBackendBase::SimBackendBase(sim::Engine& engine, BackendDescriptor descriptor)
    : engine_(engine), desc_(std::move(descriptor)) {}

void SimBackendBase::install_predefined_objects() {
  std::lock_guard lock(mu_);
  for (const StdDatatypeSpec& spec : std_datatype_specs()) {
    NativeHandle native = desc_.std_to_native.at(spec.std_value);
    int sim_id = engine_.register_builtin_type(spec.size, spec.num_kind);
    objects_[native] = ObjRef{ObjKind::Datatype, sim_id, true, 1, spec.size};
    sim_dtype_to_native_[sim_id] = native;
  }
  for (const PredefinedRow& row : predefined_rows()) {
    if (row.kind != HandleKind::Op || row.value == 0x020) continue;
    NativeHandle native = desc_.std_to_native.at(row.value);
    int sim_id = engine_.register_op(
        sim::make_predefined_op(predef_op_of(row.value), engine_), true);
    objects_[native] = ObjRef{ObjKind::Op, sim_id, true, 1, 0};
  }
  NativeHandle world = desc_.std_to_native.at(0x101);
  NativeHandle self = desc_.std_to_native.at(0x102);
  objects_[world] = ObjRef{ObjKind::Comm, sim::kCommWorld, true, 1, 0};
  objects_[self] = ObjRef{ObjKind::Comm, sim::kCommSelf, true, 1, 0};
  sim_comm_to_native_[sim::kCommWorld] = world;
  sim_comm_to_native_[sim::kCommSelf] = self;
}

int SimBackendBase::native_of_class(int cls) const {
  if (cls == 0) return 0;
  auto it = desc_.class_to_native.find(cls);
  return it != desc_.class_to_native.end()
             ? it->second
             : desc_.class_to_native.at(constants::ERR_OTHER);
}

int SimBackendBase::class_of_native(int native) const {
  if (native == 0) return 0;
  auto it = desc_.native_to_class.find(native);
  return it != desc_.native_to_class.end() ? it->second : constants::ERR_OTHER;
}

int SimBackendBase::ret(sim::Err e, int handle_class) const {
  if (e == sim::Err::ok) return 0;
  if (e == sim::Err::invalid_handle) return native_of_class(handle_class);
  return native_of_class(sim_err_to_class(e));
}

NativeHandle SimBackendBase::native_null(HandleKind kind) const {
  return desc_.std_to_native.at(null_handle_of(kind).value);
}

const SimBackendBase::ObjRef* SimBackendBase::find(NativeHandle h,
                                                   ObjKind kind) const {
  std::lock_guard lock(mu_);
  auto it = objects_.find(h);
  if (it == objects_.end() || it->second.kind != kind) return nullptr;
  return &it->second;
}

void SimBackendBase::pack_status(const sim::StatusPayload& payload,
                                 void* bytes) const {
  if (!bytes) return;
  sim::StatusPayload native = payload;
  native.error = native_of_class(sim_err_to_class(static_cast<sim::Err>(payload.error)));
  pack_native_status(desc_.status_layout, native, bytes);
}

int SimBackendBase::init() {
  initialized_ = true;
  return 0;
}

int SimBackendBase::finalize() {
  initialized_ = false;
  return 0;
}

int SimBackendBase::comm_size(NativeHandle comm, int* size) {
  const ObjRef* rec = find(comm, ObjKind::Comm);
  if (!rec) return native_of_class(constants::ERR_COMM);
  return ret(engine_.comm_size(rec->sim_id, size), constants::ERR_COMM);
}

int SimBackendBase::comm_rank(NativeHandle comm, int* rank) {
  const ObjRef* rec = find(comm, ObjKind::Comm);
  if (!rec) return native_of_class(constants::ERR_COMM);
  return ret(engine_.comm_rank(rec->sim_id, rank), constants::ERR_COMM);
}

int SimBackendBase::comm_dup(NativeHandle comm, NativeHandle* newcomm) {
  const ObjRef* rec = find(comm, ObjKind::Comm);
  if (!rec) return native_of_class(constants::ERR_COMM);
  int sim_id;
  sim::Err e = engine_.comm_dup(rec->sim_id, &sim_id);
  if (e != sim::Err::ok) return ret(e, constants::ERR_COMM);
  std::lock_guard lock(mu_);
  auto it = sim_comm_to_native_.find(sim_id);
  if (it != sim_comm_to_native_.end()) {
    objects_[it->second].refs++;
    *newcomm = it->second;
    return 0;
  }
  NativeHandle native = allocate_user_handle(ObjKind::Comm);
  objects_[native] = ObjRef{ObjKind::Comm, sim_id, false, 1, 0};
  sim_comm_to_native_[sim_id] = native;
  *newcomm = native;
  return 0;
}

int SimBackendBase::comm_free(NativeHandle* comm) {
  const ObjRef* rec = find(*comm, ObjKind::Comm);
  if (!rec || rec->predefined) return native_of_class(constants::ERR_COMM);
  sim::Err e = engine_.comm_free(rec->sim_id);
  if (e != sim::Err::ok) return ret(e, constants::ERR_COMM);
  {
    std::lock_guard lock(mu_);
    auto it = objects_.find(*comm);
    if (it != objects_.end() && --it->second.refs == 0) {
      sim_comm_to_native_.erase(it->second.sim_id);
      objects_.erase(it);
    }
  }
  *comm = native_null(HandleKind::Comm);
  return 0;
}

int SimBackendBase::send(const void* buf, int count, NativeHandle dtype, int dest,
                         int tag, NativeHandle comm) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  return ret(engine_.send(c->sim_id, dest, tag, buf, count, t->sim_id));
}

int SimBackendBase::isend(const void* buf, int count, NativeHandle dtype,
                          int dest, int tag, NativeHandle comm,
                          NativeHandle* request) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  int sim_req;
  sim::Err e = engine_.isend(c->sim_id, dest, tag, buf, count, t->sim_id, &sim_req);
  if (e != sim::Err::ok) return ret(e);
  std::lock_guard lock(mu_);
  NativeHandle native = allocate_user_handle(ObjKind::Request);
  objects_[native] = ObjRef{ObjKind::Request, sim_req, false, 1, 0};
  *request = native;
  return 0;
}

int SimBackendBase::irecv(void* buf, int count, NativeHandle dtype, int source,
                          int tag, NativeHandle comm, NativeHandle* request) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  int src = source == desc_.native_any_source ? sim::kAnySource : source;
  int tg = tag == desc_.native_any_tag ? sim::kAnyTag : tag;
  int sim_req;
  sim::Err e = engine_.irecv(c->sim_id, src, tg, buf, count, t->sim_id, &sim_req);
  if (e != sim::Err::ok) return ret(e);
  std::lock_guard lock(mu_);
  NativeHandle native = allocate_user_handle(ObjKind::Request);
  objects_[native] = ObjRef{ObjKind::Request, sim_req, false, 1, 0};
  *request = native;
  return 0;
}

int SimBackendBase::recv(void* buf, int count, NativeHandle dtype, int source,
                         int tag, NativeHandle comm, void* status_bytes) {
  NativeHandle req;
  int rc = irecv(buf, count, dtype, source, tag, comm, &req);
  if (rc != 0) return rc;
  return wait(&req, status_bytes);
}

int SimBackendBase::wait(NativeHandle* request, void* status_bytes) {
  if (*request == native_null(HandleKind::Request)) {
    pack_status(sim::StatusPayload{}, status_bytes);
    return 0;
  }
  const ObjRef* rec = find(*request, ObjKind::Request);
  if (!rec) return native_of_class(constants::ERR_REQUEST);
  int sim_req = rec->sim_id;
  sim::StatusPayload st;
  sim::Err e = engine_.wait(sim_req, &st);
  if (e == sim::Err::invalid_handle) return native_of_class(constants::ERR_REQUEST);
  {
    std::lock_guard lock(mu_);
    objects_.erase(*request);
  }
  *request = native_null(HandleKind::Request);
  pack_status(st, status_bytes);
  return e == sim::Err::ok ? 0 : native_of_class(sim_err_to_class(e));
}

int SimBackendBase::test(NativeHandle* request, int* flag, void* status_bytes) {
  if (*request == native_null(HandleKind::Request)) {
    *flag = 1;
    pack_status(sim::StatusPayload{}, status_bytes);
    return 0;
  }
  const ObjRef* rec = find(*request, ObjKind::Request);
  if (!rec) return native_of_class(constants::ERR_REQUEST);
  bool done = false;
  sim::StatusPayload st;
  sim::Err e = engine_.test(rec->sim_id, &done, &st);
  if (e == sim::Err::invalid_handle) return native_of_class(constants::ERR_REQUEST);
  *flag = done ? 1 : 0;
  if (done) {
    {
      std::lock_guard lock(mu_);
      objects_.erase(*request);
    }
    *request = native_null(HandleKind::Request);
    pack_status(st, status_bytes);
  }
  return e == sim::Err::ok ? 0 : native_of_class(sim_err_to_class(e));
}

int SimBackendBase::waitall(int n, NativeHandle* requests, void* status_array) {
  int rc = 0;
  auto* bytes = static_cast<std::byte*>(status_array);
  for (int i = 0; i < n; ++i) {
    void* slot = bytes ? bytes + i * desc_.status_layout.size_bytes : nullptr;
    int r = wait(&requests[i], slot);
    if (r != 0) rc = r;
  }
  return rc;
}

int SimBackendBase::testall(int n, NativeHandle* requests, int* flag,
                            void* status_array) {
  // All-or-nothing: first pass checks completion without consuming.
  for (int i = 0; i < n; ++i) {
    if (requests[i] == native_null(HandleKind::Request)) continue;
    const ObjRef* rec = find(requests[i], ObjKind::Request);
    if (!rec) return native_of_class(constants::ERR_REQUEST);
    bool done = false;
    sim::Err e = engine_.get_status(rec->sim_id, &done, nullptr);
    if (e != sim::Err::ok) return ret(e, constants::ERR_REQUEST);
    if (!done) {
      *flag = 0;
      return 0;
    }
  }
  *flag = 1;
  return waitall(n, requests, status_array);
}

int SimBackendBase::get_count(const void* status_bytes, NativeHandle dtype,
                              std::int64_t* count) {
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  sim::StatusPayload payload = unpack_native_status(desc_.status_layout, status_bytes);
  std::int64_t n;
  sim::Err e = engine_.get_count(payload, t->sim_id, &n);
  if (e != sim::Err::ok) return ret(e, constants::ERR_TYPE);
  *count = n == sim::kCountUndefined ? desc_.native_undefined : n;
  return 0;
}

int SimBackendBase::type_contiguous(int count, NativeHandle base,
                                    NativeHandle* out) {
  const ObjRef* t = find(base, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  int sim_id;
  sim::Err e = engine_.type_contiguous(count, t->sim_id, &sim_id);
  if (e != sim::Err::ok) return ret(e, constants::ERR_TYPE);
  std::int64_t extent = 0;
  engine_.type_extent(sim_id, &extent);
  std::lock_guard lock(mu_);
  NativeHandle native = allocate_user_handle(ObjKind::Datatype);
  objects_[native] = ObjRef{ObjKind::Datatype, sim_id, false, 1, extent};
  sim_dtype_to_native_[sim_id] = native;
  *out = native;
  return 0;
}

int SimBackendBase::type_commit(NativeHandle* dtype) {
  const ObjRef* t = find(*dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  return ret(engine_.type_commit(t->sim_id), constants::ERR_TYPE);
}

int SimBackendBase::type_free(NativeHandle* dtype) {
  const ObjRef* t = find(*dtype, ObjKind::Datatype);
  if (!t || t->predefined) return native_of_class(constants::ERR_TYPE);
  sim::Err e = engine_.type_free(t->sim_id);
  if (e != sim::Err::ok) return ret(e, constants::ERR_TYPE);
  {
    std::lock_guard lock(mu_);
    auto it = objects_.find(*dtype);
    if (it != objects_.end()) {
      sim_dtype_to_native_.erase(it->second.sim_id);
      objects_.erase(it);
    }
  }
  *dtype = native_null(HandleKind::Datatype);
  return 0;
}

int SimBackendBase::op_create(NativeUserFn fn, int commutative, NativeHandle* op) {
  if (!fn) return native_of_class(constants::ERR_ARG);
  std::lock_guard lock(mu_);
  NativeHandle native = allocate_user_handle(ObjKind::Op);
  // The engine hands the kernel a sim datatype id; the native callback
  // interface wants native handles and carries the op being applied as its
  // only context.
  sim::OpFn kernel = [this, fn, native](const void* in, void* inout, int count,
                                        int sim_dtype) {
    NativeHandle native_dtype;
    {
      std::lock_guard inner(mu_);
      auto it = sim_dtype_to_native_.find(sim_dtype);
      native_dtype = it != sim_dtype_to_native_.end() ? it->second : 0;
    }
    fn(in, inout, count, native_dtype, native);
  };
  int sim_id = engine_.register_op(std::move(kernel), commutative != 0);
  objects_[native] = ObjRef{ObjKind::Op, sim_id, false, 1, 0};
  *op = native;
  return 0;
}

int SimBackendBase::op_free(NativeHandle* op) {
  const ObjRef* rec = find(*op, ObjKind::Op);
  if (!rec || rec->predefined) return native_of_class(constants::ERR_OP);
  sim::Err e = engine_.op_free(rec->sim_id);
  if (e != sim::Err::ok) return ret(e, constants::ERR_OP);
  {
    std::lock_guard lock(mu_);
    objects_.erase(*op);
  }
  *op = native_null(HandleKind::Op);
  return 0;
}

int SimBackendBase::reduce(const void* sendbuf, void* recvbuf, int count,
                           NativeHandle dtype, NativeHandle op, int root,
                           NativeHandle comm) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  const ObjRef* o = find(op, ObjKind::Op);
  if (!o) return native_of_class(constants::ERR_OP);
  return ret(engine_.reduce(c->sim_id, root, sendbuf, recvbuf, count, t->sim_id,
                            o->sim_id));
}

int SimBackendBase::allreduce(const void* sendbuf, void* recvbuf, int count,
                              NativeHandle dtype, NativeHandle op,
                              NativeHandle comm) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  const ObjRef* t = find(dtype, ObjKind::Datatype);
  if (!t) return native_of_class(constants::ERR_TYPE);
  const ObjRef* o = find(op, ObjKind::Op);
  if (!o) return native_of_class(constants::ERR_OP);
  return ret(engine_.allreduce(c->sim_id, sendbuf, recvbuf, count, t->sim_id,
                               o->sim_id));
}

int SimBackendBase::ialltoallw(const void* sendbuf, const int sendcounts[],
                               const std::int64_t senddispls[],
                               const NativeHandle sendtypes[], void* recvbuf,
                               const int recvcounts[],
                               const std::int64_t recvdispls[],
                               const NativeHandle recvtypes[], NativeHandle comm,
                               NativeHandle* request) {
  const ObjRef* c = find(comm, ObjKind::Comm);
  if (!c) return native_of_class(constants::ERR_COMM);
  int n;
  sim::Err e = engine_.comm_size(c->sim_id, &n);
  if (e != sim::Err::ok) return ret(e, constants::ERR_COMM);

  std::vector<int> stypes(n), rtypes(n);
  for (int i = 0; i < n; ++i) {
    const ObjRef* st = find(sendtypes[i], ObjKind::Datatype);
    const ObjRef* rt = find(recvtypes[i], ObjKind::Datatype);
    if (!st || !rt) return native_of_class(constants::ERR_TYPE);
    stypes[i] = st->sim_id;
    rtypes[i] = rt->sim_id;
  }
  int sim_req;
  e = engine_.ialltoallw(
      c->sim_id, sendbuf, {sendcounts, static_cast<std::size_t>(n)},
      {senddispls, static_cast<std::size_t>(n)}, stypes, recvbuf,
      {recvcounts, static_cast<std::size_t>(n)},
      {recvdispls, static_cast<std::size_t>(n)}, rtypes, &sim_req);
  if (e != sim::Err::ok) return ret(e);
  std::lock_guard lock(mu_);
  NativeHandle native = allocate_user_handle(ObjKind::Request);
  objects_[native] = ObjRef{ObjKind::Request, sim_req, false, 1, 0};
  *request = native;
  return 0;
}

std::string SimBackendBase::error_string(int code) {
  if (code == 0) return "no error";
  int cls = class_of_native(code);
  for (const ConstantDef& def : standard_constant_table())
    if (def.family == ConstantFamily::ErrorClass && def.value == cls)
      return std::string(def.name);
  return "unknown error";
}

}  // namespace mpiabi::backend
