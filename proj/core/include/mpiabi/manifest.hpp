#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mpiabi {

// One line of the machine-readable constants manifest:
// NAME<TAB>KIND<TAB>VALUE_HEX, sorted by value (name breaks ties).
struct ManifestRecord {
  std::string name;
  std::string kind;
  std::int64_t value;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// Every predefined handle, integer constant, and attribute callback.
std::vector<ManifestRecord> standard_manifest();

std::string emit_manifest(std::vector<ManifestRecord> records);

// Throws std::invalid_argument on malformed input.
std::vector<ManifestRecord> parse_manifest(std::string_view text);

// Human-readable differences; empty when the manifests agree.
std::vector<std::string> diff_manifests(const std::vector<ManifestRecord>& a,
                                        const std::vector<ManifestRecord>& b);

}  // namespace mpiabi
