#include "harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <functional>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "mpiabi/backend.hpp"
#include "mpiabi/shim.hpp"

namespace mpiabi::bench {

namespace {

constexpr int kReps = 5;
const AbiHandle kStdInt{0x209};
const AbiHandle kStdInt32{0x250};
const AbiHandle kStdWorld{0x101};

double median_ns(std::array<double, kReps> samples) {
  std::sort(samples.begin(), samples.end());
  return samples[kReps / 2];
}

double time_once(const std::function<void()>& body, std::int64_t iters) {
  auto t0 = std::chrono::steady_clock::now();
  body();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::nano>(t1 - t0).count() /
         static_cast<double>(iters);
}

double measure(const std::function<void()>& body, std::int64_t iters) {
  std::array<double, kReps> samples;
  for (double& s : samples) s = time_once(body, iters);
  return median_ns(samples);
}

}  // namespace

BenchReport run_type_size(std::string_view backend_name, std::int64_t iters) {
  if (iters < kMinTypeSizeIters)
    throw std::invalid_argument(
        fmt::format("type_size needs at least {} iterations", kMinTypeSizeIters));

  sim::Engine engine(1);
  auto backend = backend::backend_registry_get(backend_name, engine);
  backend->init();
  backend::NativeHandle native_int =
      backend->descriptor().std_to_native.at(kStdInt.value);

  shim::Shim shim;
  if (shim.init(backend_name, engine) != 0)
    throw std::runtime_error("shim init failed");

  // Functional identity first: both paths must report the same size.
  std::int64_t direct_sz = 0, shim_sz = 0;
  if (backend->type_size(native_int, &direct_sz) != 0 ||
      shim.type_size(kStdInt, &shim_sz) != 0 || direct_sz != shim_sz)
    throw std::runtime_error("type_size variants disagree");

  volatile std::int64_t sink = 0;
  double direct = measure(
      [&] {
        std::int64_t sz = 0;
        for (std::int64_t i = 0; i < iters; ++i) {
          backend->type_size(native_int, &sz);
          sink += sz;
        }
      },
      iters);
  double through = measure(
      [&] {
        std::int64_t sz = 0;
        for (std::int64_t i = 0; i < iters; ++i) {
          shim.type_size(kStdInt, &sz);
          sink += sz;
        }
      },
      iters);
  shim.finalize();

  BenchReport r;
  r.scenario = "type_size";
  r.backend = backend_name;
  r.iterations = iters;
  r.direct_ns_per_call = direct;
  r.shim_ns_per_call = through;
  r.ratio = through / direct;
  return r;
}

BenchReport run_pingpong(std::string_view backend_name, std::int64_t iters) {
  if (iters < kMinPingpongIters)
    throw std::invalid_argument(
        fmt::format("pingpong needs at least {} iterations", kMinPingpongIters));

  auto direct_run = [&](std::int64_t n) {
    sim::Engine engine(2);
    auto backend = backend::backend_registry_get(backend_name, engine);
    backend->init();
    const auto& d = backend->descriptor();
    backend::NativeHandle ncomm = d.std_to_native.at(kStdWorld.value);
    backend::NativeHandle ntype = d.std_to_native.at(kStdInt32.value);
    std::int64_t checksum = 0;
    engine.run({[&] {
                  std::int32_t v = 0;
                  for (std::int64_t i = 0; i < n; ++i) {
                    v = static_cast<std::int32_t>(i);
                    backend->send(&v, 1, ntype, 1, 0, ncomm);
                    backend->recv(&v, 1, ntype, 1, 0, ncomm, nullptr);
                    checksum += v;
                  }
                },
                [&] {
                  std::int32_t v = 0;
                  for (std::int64_t i = 0; i < n; ++i) {
                    backend->recv(&v, 1, ntype, 0, 0, ncomm, nullptr);
                    v += 1;
                    backend->send(&v, 1, ntype, 0, 0, ncomm);
                  }
                }});
    return checksum;
  };

  auto shim_run = [&](std::int64_t n) {
    sim::Engine engine(2);
    shim::Shim shim;
    if (shim.init(backend_name, engine) != 0)
      throw std::runtime_error("shim init failed");
    std::int64_t checksum = 0;
    engine.run({[&] {
                  std::int32_t v = 0;
                  for (std::int64_t i = 0; i < n; ++i) {
                    v = static_cast<std::int32_t>(i);
                    shim.send(&v, 1, kStdInt32, 1, 0, kStdWorld);
                    shim.recv(&v, 1, kStdInt32, 1, 0, kStdWorld, nullptr);
                    checksum += v;
                  }
                },
                [&] {
                  std::int32_t v = 0;
                  for (std::int64_t i = 0; i < n; ++i) {
                    shim.recv(&v, 1, kStdInt32, 0, 0, kStdWorld, nullptr);
                    v += 1;
                    shim.send(&v, 1, kStdInt32, 0, 0, kStdWorld);
                  }
                }});
    shim.finalize();
    return checksum;
  };

  // Functional identity: the round-trip checksum must match between paths.
  constexpr std::int64_t kCheckIters = 64;
  if (direct_run(kCheckIters) != shim_run(kCheckIters))
    throw std::runtime_error("pingpong variants disagree");

  double direct = measure([&] { direct_run(iters); }, iters);
  double through = measure([&] { shim_run(iters); }, iters);

  BenchReport r;
  r.scenario = "pingpong";
  r.backend = backend_name;
  r.iterations = iters;
  r.direct_ns_per_call = direct;
  r.shim_ns_per_call = through;
  r.ratio = through / direct;
  return r;
}

std::string to_csv(const BenchReport& r) {
  return fmt::format("{},{},direct,{:.2f}\n{},{},shim,{:.2f}\n", r.scenario,
                     r.backend, r.direct_ns_per_call, r.scenario, r.backend,
                     r.shim_ns_per_call);
}

std::string to_json(const BenchReport& r) {
  nlohmann::json j{{"scenario", r.scenario},
                   {"backend", r.backend},
                   {"iterations", r.iterations},
                   {"direct_ns_per_call", r.direct_ns_per_call},
                   {"shim_ns_per_call", r.shim_ns_per_call},
                   {"ratio", r.ratio}};
  return j.dump(2) + "\n";
}

}  // namespace mpiabi::bench
