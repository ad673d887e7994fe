#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace mpiabi {

// Handles are signed machine words.  Values below 1024 are the 10-bit
// Huffman-coded predefined region; zero is never a valid handle.
using HandleValue = std::int64_t;

inline constexpr HandleValue kPredefinedRegionEnd = 1024;

struct AbiHandle {
  HandleValue value = 0;
  friend constexpr bool operator==(AbiHandle, AbiHandle) = default;
};

enum class HandleKind {
  Op,
  Comm,
  Group,
  Win,
  File,
  Session,
  Message,
  Errhandler,
  Request,
  Datatype,
};

std::string_view to_string(HandleKind kind);

enum class Disposition {
  Invalid,    // value 0, and only value 0
  Reserved,   // inside the 10-bit region but not an enumerated constant
  Predefined, // enumerated constant, kind and name known
  UserSpace,  // outside the 10-bit region
};

std::string_view to_string(Disposition d);

struct HandleClassification {
  Disposition disposition = Disposition::Invalid;
  std::optional<HandleKind> kind;
  std::optional<std::string_view> name;
};

// One enumerated row of the predefined-handle tables.
struct PredefinedRow {
  HandleValue value;
  HandleKind kind;
  std::string_view name;
  // Present for fixed-size datatypes (prefix 0b1001): the byte size
  // implied by the row's name, used to cross-check the bit encoding.
  std::optional<int> named_size;
};

// Every enumerated predefined handle, sorted by value.
std::span<const PredefinedRow> predefined_rows();

// Total over all machine words; never fails.
HandleClassification classify_handle(HandleValue value);

// The kind's prefix bits followed by zeros.
AbiHandle null_handle_of(HandleKind kind);

// For fixed-size datatypes (prefix 0b1001) returns 2^(bits 3-5);
// variable-size datatypes and DATATYPE_NULL return nullopt.
// Throws std::domain_error if the handle is not a datatype.
std::optional<int> datatype_fixed_size(AbiHandle handle);

// Inverse of classify_handle over the enumerated rows.
// Throws std::out_of_range for unknown names.
AbiHandle lookup_predefined(std::string_view name);

}  // namespace mpiabi
