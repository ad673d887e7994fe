#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

#include "mpiabi/handles.hpp"
#include "mpiabi/simcore.hpp"

namespace mpiabi::backend {

// Backend-interpreted machine word: a small bit-coded integer for the
// "int" backend, an opaque registry token for the "token" backend.
using NativeHandle = std::int64_t;

enum class StatusStyle {
  IntStyle,    // { count_lo, count_hi_and_cancelled, SOURCE, TAG, ERROR }
  TokenStyle,  // { SOURCE, TAG, ERROR, cancelled, ucount (word-sized) }
};

struct NativeStatusLayout {
  StatusStyle style;
  int size_bytes;
};

inline constexpr NativeStatusLayout kIntStatusLayout{StatusStyle::IntStyle, 20};
inline constexpr NativeStatusLayout kTokenStatusLayout{StatusStyle::TokenStyle, 24};

// Native user reduction function.  The callback interface carries no user
// data slot; the op handle being applied is the only context available.
using NativeUserFn = void (*)(const void* in, void* inout, int count,
                              NativeHandle datatype, NativeHandle op);

// Tells the shim how to convert to and from this backend's surface.
struct BackendDescriptor {
  std::string name;
  NativeStatusLayout status_layout{StatusStyle::IntStyle, 20};

  // Predefined-handle bijection over the constants both sides define.
  std::unordered_map<HandleValue, NativeHandle> std_to_native;
  std::unordered_map<NativeHandle, HandleValue> native_to_std;

  // Error-class bijection; 0 maps to 0 in both directions.
  std::unordered_map<int, int> native_to_class;
  std::unordered_map<int, int> class_to_native;

  NativeHandle native_any_source = 0;
  NativeHandle native_any_tag = 0;
  std::int64_t native_undefined = 0;
};

// The semantic operation set.  Arguments and results are entirely in the
// backend's native terms: native handles, native status bytes, native
// error codes.
class BackendApi {
 public:
  virtual ~BackendApi() = default;

  virtual const BackendDescriptor& descriptor() const = 0;

  virtual int init() = 0;
  virtual int finalize() = 0;

  virtual int comm_size(NativeHandle comm, int* size) = 0;
  virtual int comm_rank(NativeHandle comm, int* rank) = 0;
  virtual int comm_dup(NativeHandle comm, NativeHandle* newcomm) = 0;
  virtual int comm_free(NativeHandle* comm) = 0;

  virtual int send(const void* buf, int count, NativeHandle dtype, int dest,
                   int tag, NativeHandle comm) = 0;
  virtual int recv(void* buf, int count, NativeHandle dtype, int source, int tag,
                   NativeHandle comm, void* status_bytes) = 0;
  virtual int isend(const void* buf, int count, NativeHandle dtype, int dest,
                    int tag, NativeHandle comm, NativeHandle* request) = 0;
  virtual int irecv(void* buf, int count, NativeHandle dtype, int source,
                    int tag, NativeHandle comm, NativeHandle* request) = 0;

  virtual int wait(NativeHandle* request, void* status_bytes) = 0;
  virtual int test(NativeHandle* request, int* flag, void* status_bytes) = 0;
  virtual int waitall(int n, NativeHandle* requests, void* status_array) = 0;
  virtual int testall(int n, NativeHandle* requests, int* flag,
                      void* status_array) = 0;

  virtual int get_count(const void* status_bytes, NativeHandle dtype,
                        std::int64_t* count) = 0;

  virtual int type_size(NativeHandle dtype, std::int64_t* size) = 0;
  virtual int type_contiguous(int count, NativeHandle base, NativeHandle* out) = 0;
  virtual int type_commit(NativeHandle* dtype) = 0;
  virtual int type_free(NativeHandle* dtype) = 0;

  virtual int op_create(NativeUserFn fn, int commutative, NativeHandle* op) = 0;
  virtual int op_free(NativeHandle* op) = 0;

  virtual int reduce(const void* sendbuf, void* recvbuf, int count,
                     NativeHandle dtype, NativeHandle op, int root,
                     NativeHandle comm) = 0;
  virtual int allreduce(const void* sendbuf, void* recvbuf, int count,
                        NativeHandle dtype, NativeHandle op, NativeHandle comm) = 0;
  virtual int ialltoallw(const void* sendbuf, const int sendcounts[],
                         const std::int64_t senddispls[],
                         const NativeHandle sendtypes[], void* recvbuf,
                         const int recvcounts[], const std::int64_t recvdispls[],
                         const NativeHandle recvtypes[], NativeHandle comm,
                         NativeHandle* request) = 0;

  virtual std::string error_string(int code) = 0;
};

// Backend selection: environment key and its CLI-flag counterpart.
inline constexpr const char* kBackendEnvKey = "ABI_BRIDGE_BACKEND";

// In-process stand-in for dlopen-based activation.  Known names: "int",
// "token".  Repeated calls with the same name and engine return the same
// backend instance.  Throws std::out_of_range for unknown names.
std::shared_ptr<BackendApi> backend_registry_get(std::string_view name,
                                                 sim::Engine& engine);

// Status codecs shared between backends and the shim.

#pragma pack(push, 4)
struct IntStyleStatus {
  std::int32_t count_lo;
  std::int32_t count_hi_and_cancelled;  // bit 0: cancelled, bits 1-31: count_hi
  std::int32_t source;
  std::int32_t tag;
  std::int32_t error;
};

struct TokenStyleStatus {
  std::int32_t source;
  std::int32_t tag;
  std::int32_t error;
  std::int32_t cancelled;
  std::uint64_t ucount;
};
#pragma pack(pop)

static_assert(sizeof(IntStyleStatus) == 20);
static_assert(sizeof(TokenStyleStatus) == 24);

void int_status_pack(const sim::StatusPayload& in, IntStyleStatus* out);
sim::StatusPayload int_status_unpack(const IntStyleStatus& in);
void token_status_pack(const sim::StatusPayload& in, TokenStyleStatus* out);
sim::StatusPayload token_status_unpack(const TokenStyleStatus& in);

// Unpacks whichever layout the descriptor declares.
sim::StatusPayload unpack_native_status(const NativeStatusLayout& layout,
                                        const void* bytes);
void pack_native_status(const NativeStatusLayout& layout,
                        const sim::StatusPayload& payload, void* bytes);

}  // namespace mpiabi::backend
