#pragma once

// Shared machinery for the two mock backends: generic forwarding onto the
// simulation engine, with the native surface (constants, status layout,
// handle allocation, type-size mechanism) left to the concrete backend.

#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "mpiabi/backend.hpp"
#include "mpiabi/constants.hpp"

namespace mpiabi::backend {

enum class ObjKind { Comm, Datatype, Op, Request };

// Per-handle standard datatype metadata for the host width profile.
struct StdDatatypeSpec {
  HandleValue std_value;
  std::int64_t size;
  sim::NumKind num_kind;
};

std::span<const StdDatatypeSpec> std_datatype_specs();

// Standard op handle value -> engine kernel code.
sim::PredefOp predef_op_of(HandleValue std_value);

// Engine error -> standard error class (backends then map the class to
// their native code).
int sim_err_to_class(sim::Err e);

class SimBackendBase : public BackendApi {
 public:
  SimBackendBase(sim::Engine& engine, BackendDescriptor descriptor);

  const BackendDescriptor& descriptor() const override { return desc_; }

  int init() override;
  int finalize() override;

  int comm_size(NativeHandle comm, int* size) override;
  int comm_rank(NativeHandle comm, int* rank) override;
  int comm_dup(NativeHandle comm, NativeHandle* newcomm) override;
  int comm_free(NativeHandle* comm) override;

  int send(const void* buf, int count, NativeHandle dtype, int dest, int tag,
           NativeHandle comm) override;
  int recv(void* buf, int count, NativeHandle dtype, int source, int tag,
           NativeHandle comm, void* status_bytes) override;
  int isend(const void* buf, int count, NativeHandle dtype, int dest, int tag,
            NativeHandle comm, NativeHandle* request) override;
  int irecv(void* buf, int count, NativeHandle dtype, int source, int tag,
            NativeHandle comm, NativeHandle* request) override;

  int wait(NativeHandle* request, void* status_bytes) override;
  int test(NativeHandle* request, int* flag, void* status_bytes) override;
  int waitall(int n, NativeHandle* requests, void* status_array) override;
  int testall(int n, NativeHandle* requests, int* flag, void* status_array) override;

  int get_count(const void* status_bytes, NativeHandle dtype,
                std::int64_t* count) override;

  // type_size is left to the concrete backend: the "int" backend decodes it
  // from the handle bits, the "token" backend looks it up in its registry.
  int type_contiguous(int count, NativeHandle base, NativeHandle* out) override;
  int type_commit(NativeHandle* dtype) override;
  int type_free(NativeHandle* dtype) override;

  int op_create(NativeUserFn fn, int commutative, NativeHandle* op) override;
  int op_free(NativeHandle* op) override;

  int reduce(const void* sendbuf, void* recvbuf, int count, NativeHandle dtype,
             NativeHandle op, int root, NativeHandle comm) override;
  int allreduce(const void* sendbuf, void* recvbuf, int count, NativeHandle dtype,
                NativeHandle op, NativeHandle comm) override;
  int ialltoallw(const void* sendbuf, const int sendcounts[],
                 const std::int64_t senddispls[], const NativeHandle sendtypes[],
                 void* recvbuf, const int recvcounts[],
                 const std::int64_t recvdispls[], const NativeHandle recvtypes[],
                 NativeHandle comm, NativeHandle* request) override;

  std::string error_string(int code) override;

 protected:
  struct ObjRef {
    ObjKind kind;
    int sim_id = 0;
    bool predefined = false;
    int refs = 1;
    std::int64_t dtype_size = 0;
  };

  virtual NativeHandle allocate_user_handle(ObjKind kind) = 0;

  // Called once from the concrete constructor after the descriptor's
  // predefined table is final: creates engine objects for datatypes, ops,
  // and the world/self communicators.
  void install_predefined_objects();

  int native_of_class(int cls) const;
  int class_of_native(int native) const;
  int ret(sim::Err e, int handle_class = constants::ERR_ARG) const;

  NativeHandle native_null(HandleKind kind) const;

  // Looks up a live native handle of the expected kind; returns nullptr if
  // unknown, stale, or of a different kind.
  const ObjRef* find(NativeHandle h, ObjKind kind) const;

  void pack_status(const sim::StatusPayload& payload, void* bytes) const;

  sim::Engine& engine_;
  BackendDescriptor desc_;
  bool initialized_ = false;

  mutable std::mutex mu_;
  std::unordered_map<NativeHandle, ObjRef> objects_;
  std::unordered_map<int, NativeHandle> sim_dtype_to_native_;
  std::unordered_map<int, NativeHandle> sim_comm_to_native_;
};

// Concrete backend factories, used by the registry.
std::shared_ptr<BackendApi> make_int_backend(sim::Engine& engine);
std::shared_ptr<BackendApi> make_token_backend(sim::Engine& engine);

}  // namespace mpiabi::backend
