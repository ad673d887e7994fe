#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace mpiabi::sim {

// Engine-internal error codes.  Backends translate these to their native
// numeric values; the shim translates those to standard error classes.
enum class Err {
  ok = 0,
  truncate,
  invalid_handle,
  invalid_arg,
  not_committed,
  pending,   // operation on a still-pending request (e.g. freeing it)
  internal,
};

std::string_view to_string(Err e);

// Engine-internal wildcard selectors.
inline constexpr int kAnySource = -1;
inline constexpr int kAnyTag = -2;

// Predefined communicators.
inline constexpr int kCommWorld = 1;
inline constexpr int kCommSelf = 2;

// Count value reported by get_count when the byte count is not a whole
// number of elements.
inline constexpr std::int64_t kCountUndefined = -1;

struct StatusPayload {
  int source = -1;
  int tag = -1;
  int error = 0;  // engine Err as int
  std::int64_t count_bytes = 0;
  bool cancelled = false;

  friend bool operator==(const StatusPayload&, const StatusPayload&) = default;
};

enum class NumKind { Int, Uint, Float, Byte };

struct TypeInfo {
  std::int64_t extent = 0;
  NumKind kind = NumKind::Byte;
  bool builtin = true;
  bool committed = false;
};

// User reduction callback: combines `count` elements of `dtype` from `in`
// into `inout`, element-wise, in place.
using OpFn = std::function<void(const void* in, void* inout, int count, int dtype)>;

enum class PredefOp {
  Sum, Prod, Min, Max, Band, Bor, Bxor, Land, Lor, Lxor,
  Minloc, Maxloc, Replace, NoOp,
};

class Engine;

// Element-wise kernels shared by both backends so reduction semantics are
// identical.  Minloc/Maxloc require pair layouts the engine does not model
// and throw std::domain_error if applied.
OpFn make_predefined_op(PredefOp code, Engine& engine);

// N simulated ranks in one process.  Rank programs run as threads; the
// calling rank is ambient (thread-local), as in real MPI processes.
class Engine {
 public:
  explicit Engine(int nranks, unsigned seed = 0);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  int nranks() const { return nranks_; }

  // Runs one program per rank, each in its own thread.  Rethrows the first
  // program exception after all threads join.
  void run(std::vector<std::function<void()>> programs);

  // The ambient rank inside a program; -1 outside run().
  static int current_rank();

  // -- datatypes --
  int register_builtin_type(std::int64_t byte_size, NumKind kind);
  Err type_contiguous(int count, int base, int* out);
  Err type_commit(int dtype);
  Err type_free(int dtype);
  Err type_extent(int dtype, std::int64_t* extent) const;
  Err type_info(int dtype, TypeInfo* info) const;

  // -- reduction operations --
  int register_op(OpFn fn, bool commutative);
  Err op_free(int op);

  // -- communicators --
  Err comm_size(int comm, int* size) const;
  Err comm_rank(int comm, int* rank) const;
  Err comm_dup(int comm, int* newcomm);
  Err comm_free(int comm);

  // -- point to point --
  Err send(int comm, int dest, int tag, const void* buf, int count, int dtype);
  Err recv(int comm, int source, int tag, void* buf, int count, int dtype,
           StatusPayload* status);
  Err isend(int comm, int dest, int tag, const void* buf, int count, int dtype,
            int* request);
  Err irecv(int comm, int source, int tag, void* buf, int count, int dtype,
            int* request);

  // -- request completion --
  Err wait(int request, StatusPayload* status);
  Err test(int request, bool* flag, StatusPayload* status);
  Err waitall(std::span<const int> requests, std::span<StatusPayload> statuses);
  Err testall(std::span<const int> requests, bool* flag,
              std::span<StatusPayload> statuses);
  // Non-consuming completion check (MPI_Request_get_status analog).
  Err get_status(int request, bool* complete, StatusPayload* status) const;
  Err request_free(int request);  // Err::pending if not complete

  Err get_count(const StatusPayload& status, int dtype, std::int64_t* count) const;

  // -- collectives --
  Err reduce(int comm, int root, const void* sendbuf, void* recvbuf, int count,
             int dtype, int op);
  Err allreduce(int comm, const void* sendbuf, void* recvbuf, int count,
                int dtype, int op);
  Err ialltoallw(int comm, const void* sendbuf, std::span<const int> sendcounts,
                 std::span<const std::int64_t> senddispls,
                 std::span<const int> sendtypes, void* recvbuf,
                 std::span<const int> recvcounts,
                 std::span<const std::int64_t> recvdispls,
                 std::span<const int> recvtypes, int* request);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int nranks_;
};

// Installs an ambient rank on the current thread, for code that talks to
// the engine outside of Engine::run (benchmarks, single-threaded tests).
class ScopedRank {
 public:
  explicit ScopedRank(int rank);
  ~ScopedRank();
  ScopedRank(const ScopedRank&) = delete;
  ScopedRank& operator=(const ScopedRank&) = delete;

 private:
  int previous_;
};

}  // namespace mpiabi::sim
