#include <benchmark/benchmark.h>

#include "mpiabi/backend.hpp"
#include "mpiabi/handles.hpp"
#include "mpiabi/shim.hpp"

namespace {

using namespace mpiabi;

void BM_ClassifyHandle(benchmark::State& state) {
  HandleValue v = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(classify_handle(v));
}
BENCHMARK(BM_ClassifyHandle)->Arg(0x021)->Arg(0x250)->Arg(0x7FFF);

void BM_DatatypeFixedSize(benchmark::State& state) {
  AbiHandle h{0x250};
  for (auto _ : state) benchmark::DoNotOptimize(datatype_fixed_size(h));
}
BENCHMARK(BM_DatatypeFixedSize);

void shim_type_size_bench(benchmark::State& state, const char* backend) {
  sim::Engine engine(1);
  shim::Shim shim;
  shim.init(backend, engine);
  AbiHandle h{0x209};
  std::int64_t sz = 0;
  for (auto _ : state) {
    shim.type_size(h, &sz);
    benchmark::DoNotOptimize(sz);
  }
  shim.finalize();
}

void BM_ShimTypeSizeInt(benchmark::State& state) {
  shim_type_size_bench(state, "int");
}
BENCHMARK(BM_ShimTypeSizeInt);

void BM_ShimTypeSizeToken(benchmark::State& state) {
  shim_type_size_bench(state, "token");
}
BENCHMARK(BM_ShimTypeSizeToken);

}  // namespace

BENCHMARK_MAIN();
