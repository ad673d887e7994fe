#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mpiabi::bench {

// One scenario measured two ways: straight against the backend's native
// surface, and through the standard shim on top of it.  Timings are the
// median of five measurement repetitions.
struct BenchReport {
  std::string scenario;
  std::string backend;
  std::int64_t iterations = 0;
  double direct_ns_per_call = 0.0;
  double shim_ns_per_call = 0.0;
  double ratio = 0.0;  // shim / direct
};

inline constexpr std::int64_t kMinTypeSizeIters = 100000;
inline constexpr std::int64_t kMinPingpongIters = 10000;

// Both throw std::invalid_argument if `iters` is below the scenario's
// floor, and std::runtime_error if the two variants disagree functionally.
BenchReport run_type_size(std::string_view backend, std::int64_t iters);
BenchReport run_pingpong(std::string_view backend, std::int64_t iters);

// `scenario,backend,variant,ns_per_call` -- one line per variant.
std::string to_csv(const BenchReport& r);
std::string to_json(const BenchReport& r);

}  // namespace mpiabi::bench
