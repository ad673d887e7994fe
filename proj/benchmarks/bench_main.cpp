#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shim-overhead benchmarks"};

  std::string scenario = "all";
  std::string backend = "all";
  std::int64_t type_size_iters = 1000000;
  std::int64_t pingpong_iters = 20000;
  bool json = false;
  app.add_option("--scenario", scenario, "type_size, pingpong, or all");
  app.add_option("--backend", backend, "int, token, or all");
  app.add_option("--type-size-iters", type_size_iters, "Iterations per rep");
  app.add_option("--pingpong-iters", pingpong_iters, "Iterations per rep");
  app.add_flag("--json", json, "Emit JSON instead of CSV");

  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> backends =
      backend == "all" ? std::vector<std::string>{"int", "token"}
                       : std::vector<std::string>{backend};
  try {
    for (const std::string& b : backends) {
      if (scenario == "type_size" || scenario == "all") {
        auto r = mpiabi::bench::run_type_size(b, type_size_iters);
        std::cout << (json ? to_json(r) : to_csv(r));
      }
      if (scenario == "pingpong" || scenario == "all") {
        auto r = mpiabi::bench::run_pingpong(b, pingpong_iters);
        std::cout << (json ? to_json(r) : to_csv(r));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
