#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "mpiabi/backend.hpp"
#include "mpiabi/handles.hpp"
#include "mpiabi/status.hpp"

namespace mpiabi::shim {

// User reduction callback in standard terms.
using UserOpFn =
    std::function<void(const void* in, void* inout, int count, AbiHandle dtype)>;

// Presents the standard surface (standard handle values, 32-byte statuses,
// error classes) over one backend's native surface.  All calls return a
// standard error class; 0 is success.  Calls before init or after finalize
// return ERR_OTHER.
class Shim {
 public:
  Shim();
  ~Shim();
  Shim(const Shim&) = delete;
  Shim& operator=(const Shim&) = delete;

  int init(std::string_view backend_name, sim::Engine& engine);
  int finalize();
  bool initialized() const;

  // "libmpi_abi 1.0.0" regardless of backend.
  std::string library_version() const;
  std::string_view backend_name() const;

  int comm_size(AbiHandle comm, int* size);
  int comm_rank(AbiHandle comm, int* rank);
  int comm_dup(AbiHandle comm, AbiHandle* newcomm);
  int comm_free(AbiHandle* comm);

  int send(const void* buf, int count, AbiHandle dtype, int dest, int tag,
           AbiHandle comm);
  int recv(void* buf, int count, AbiHandle dtype, int source, int tag,
           AbiHandle comm, AbiStatus* status);
  int isend(const void* buf, int count, AbiHandle dtype, int dest, int tag,
            AbiHandle comm, AbiHandle* request);
  int irecv(void* buf, int count, AbiHandle dtype, int source, int tag,
            AbiHandle comm, AbiHandle* request);

  int wait(AbiHandle* request, AbiStatus* status);
  int test(AbiHandle* request, int* flag, AbiStatus* status);
  int waitall(int n, AbiHandle* requests, AbiStatus* statuses);
  int testall(int n, AbiHandle* requests, int* flag, AbiStatus* statuses);

  int get_count(const AbiStatus& status, AbiHandle dtype, std::int64_t* count);

  int type_size(AbiHandle dtype, std::int64_t* size);
  int type_contiguous(int count, AbiHandle base, AbiHandle* out);
  int type_commit(AbiHandle* dtype);
  int type_free(AbiHandle* dtype);

  int op_create(UserOpFn fn, int commutative, AbiHandle* op);
  int op_free(AbiHandle* op);

  int reduce(const void* sendbuf, void* recvbuf, int count, AbiHandle dtype,
             AbiHandle op, int root, AbiHandle comm);
  int allreduce(const void* sendbuf, void* recvbuf, int count, AbiHandle dtype,
                AbiHandle op, AbiHandle comm);
  int ialltoallw(const void* sendbuf, const int sendcounts[],
                 const std::int64_t senddispls[], const AbiHandle sendtypes[],
                 void* recvbuf, const int recvcounts[],
                 const std::int64_t recvdispls[], const AbiHandle recvtypes[],
                 AbiHandle comm, AbiHandle* request);

  int error_string(int errorclass, std::string* out);

  // Bookkeeping introspection, for leak checks.
  std::size_t dynamic_map_size() const;
  std::size_t request_state_size() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace mpiabi::shim
