#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mpiabi/demos.hpp"
#include "mpiabi/handles.hpp"
#include "mpiabi/header_gen.hpp"
#include "mpiabi/manifest.hpp"

namespace {

// Exit codes: 0 success, 1 semantic difference/demo failure, 2 usage or
// input errors.
constexpr int kExitDiffers = 1;
constexpr int kExitUsage = 2;

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open " << out_path << "\n";
    return kExitUsage;
  }
  out << text;
  return 0;
}

int cmd_classify(const std::string& hex) {
  std::int64_t value;
  try {
    std::size_t used = 0;
    value = std::stoll(hex, &used, 16);
    if (used != hex.size()) throw std::invalid_argument(hex);
  } catch (const std::exception&) {
    std::cerr << "not a hex value: " << hex << "\n";
    return kExitUsage;
  }
  mpiabi::HandleClassification c = mpiabi::classify_handle(value);
  switch (c.disposition) {
    case mpiabi::Disposition::Invalid:
      std::cout << "Invalid (uninitialized)\n";
      break;
    case mpiabi::Disposition::Reserved:
      std::cout << "Reserved\n";
      break;
    case mpiabi::Disposition::UserSpace:
      std::cout << "UserSpace\n";
      break;
    case mpiabi::Disposition::Predefined:
      std::cout << fmt::format("Predefined {} {}\n",
                               mpiabi::to_string(*c.kind), *c.name);
      break;
  }
  return 0;
}

int cmd_diff(const std::string& path_a, const std::string& path_b) {
  auto slurp = [](const std::string& path, std::string* out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
    return true;
  };
  std::string text_a, text_b;
  if (!slurp(path_a, &text_a) || !slurp(path_b, &text_b)) {
    std::cerr << "cannot read input manifests\n";
    return kExitUsage;
  }
  try {
    auto a = mpiabi::parse_manifest(text_a);
    auto b = mpiabi::parse_manifest(text_b);
    auto diffs = mpiabi::diff_manifests(a, b);
    for (const std::string& d : diffs) std::cout << d << "\n";
    return diffs.empty() ? 0 : kExitDiffers;
  } catch (const std::invalid_argument& e) {
    std::cerr << "malformed manifest: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_demo(const std::string& name, const std::string& backend, int ranks) {
  try {
    mpiabi::demos::DemoResult result = mpiabi::demos::run_demo(name, backend, ranks);
    std::cout << result.transcript;
    if (!result.ok) {
      std::cerr << "demo failed: " << result.message << "\n";
      return kExitDiffers;
    }
    return 0;
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inspect and exercise the MPI ABI tables"};
  app.require_subcommand(1);

  std::string out_path;

  auto* dump = app.add_subcommand("dump", "Print the constants manifest");
  dump->add_option("--out", out_path, "Write to a file instead of stdout");

  std::string hex;
  auto* classify = app.add_subcommand("classify", "Classify a handle value");
  classify->add_option("value", hex, "Handle value in hex")->required();

  auto* gen = app.add_subcommand("gen-header", "Emit the C header");
  gen->add_option("--out", out_path, "Write to a file instead of stdout");

  std::string path_a, path_b;
  auto* diff = app.add_subcommand("diff", "Compare two manifests");
  diff->add_option("a", path_a, "First manifest")->required();
  diff->add_option("b", path_b, "Second manifest")->required();

  std::string demo_name, backend;
  int ranks = 3;
  auto* demo = app.add_subcommand("demo", "Run a demo over a backend");
  demo->add_option("name", demo_name, "Demo name")->required();
  demo->add_option("--backend", backend, "Backend name (int or token)")
      ->envname("ABI_BRIDGE_BACKEND");
  demo->add_option("--ranks", ranks, "Simulated rank count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (*dump)
    return write_output(mpiabi::emit_manifest(mpiabi::standard_manifest()),
                        out_path);
  if (*classify) return cmd_classify(hex);
  if (*gen) return write_output(mpiabi::generate_c_header(), out_path);
  if (*diff) return cmd_diff(path_a, path_b);
  if (*demo) {
    if (backend.empty()) backend = "int";
    return cmd_demo(demo_name, backend, ranks);
  }
  return kExitUsage;
}
