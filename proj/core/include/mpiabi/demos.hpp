#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpiabi::demos {

// A demo drives the standard surface over one backend and writes a
// transcript of everything observable at that surface.  Transcripts contain
// only standard-side values, so a given demo must produce byte-identical
// transcripts on every backend.
struct DemoResult {
  bool ok = true;
  std::string transcript;
  std::string message;  // first failed expectation, if any
  // Demo-specific probe values (e.g. datatype handles observed inside a
  // user reduction callback), deduplicated and sorted.
  std::vector<std::int64_t> observations;
  // Shim bookkeeping left over after the demo released everything.
  std::size_t leaked_handles = 0;
  std::size_t leaked_request_state = 0;
};

std::span<const std::string_view> demo_names();

// Throws std::out_of_range for an unknown demo or backend name and
// std::invalid_argument for an unusable rank count.
DemoResult run_demo(std::string_view name, std::string_view backend_name,
                    int ranks);

}  // namespace mpiabi::demos
