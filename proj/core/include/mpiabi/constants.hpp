#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mpiabi {

enum class ConstantFamily {
  Sentinel,      // unique negative out-of-domain markers
  XorFlag,       // distinct powers of two, combinable with XOR
  StringLength,  // positive array sizes, exempt from the magnitude cap
  ErrorClass,    // MPI_SUCCESS == 0 and successors
};

std::string_view to_string(ConstantFamily family);

struct ConstantDef {
  std::string_view name;
  std::int32_t value;
  ConstantFamily family;
};

// Shipped values.  Sentinel values are non-normative placeholders; the
// proposal only requires them to be unique negatives.
namespace constants {
inline constexpr std::int32_t ANY_SOURCE = -101;
inline constexpr std::int32_t ANY_TAG = -102;
inline constexpr std::int32_t PROC_NULL = -103;
inline constexpr std::int32_t ROOT = -104;
inline constexpr std::int32_t UNDEFINED = -105;

inline constexpr std::int32_t SUCCESS = 0;
inline constexpr std::int32_t ERR_BUFFER = 1;
inline constexpr std::int32_t ERR_COUNT = 2;
inline constexpr std::int32_t ERR_TYPE = 3;
inline constexpr std::int32_t ERR_TAG = 4;
inline constexpr std::int32_t ERR_COMM = 5;
inline constexpr std::int32_t ERR_RANK = 6;
inline constexpr std::int32_t ERR_REQUEST = 7;
inline constexpr std::int32_t ERR_ROOT = 8;
inline constexpr std::int32_t ERR_GROUP = 9;
inline constexpr std::int32_t ERR_OP = 10;
inline constexpr std::int32_t ERR_TOPOLOGY = 11;
inline constexpr std::int32_t ERR_DIMS = 12;
inline constexpr std::int32_t ERR_ARG = 13;
inline constexpr std::int32_t ERR_UNKNOWN = 14;
inline constexpr std::int32_t ERR_TRUNCATE = 15;
inline constexpr std::int32_t ERR_OTHER = 16;
inline constexpr std::int32_t ERR_INTERN = 17;
inline constexpr std::int32_t ERR_PENDING = 18;
inline constexpr std::int32_t ERR_IN_STATUS = 19;

inline constexpr std::int32_t MODE_NOCHECK = 32;
inline constexpr std::int32_t MODE_NOSTORE = 64;
inline constexpr std::int32_t MODE_NOPUT = 128;
inline constexpr std::int32_t MODE_NOPRECEDE = 512;
inline constexpr std::int32_t MODE_NOSUCCEED = 1024;

inline constexpr std::int32_t MAX_PROCESSOR_NAME = 256;
inline constexpr std::int32_t MAX_ERROR_STRING = 257;
inline constexpr std::int32_t MAX_OBJECT_NAME = 258;
inline constexpr std::int32_t MAX_INFO_KEY = 255;
inline constexpr std::int32_t MAX_INFO_VAL = 1025;
inline constexpr std::int32_t MAX_PORT_NAME = 1026;
inline constexpr std::int32_t MAX_LIBRARY_VERSION_STRING = 8192;
}  // namespace constants

// Predefined attribute callbacks: 0x0 for the null copy/delete functions,
// 0xD for the dup function.
struct AttributeCallbackConstants {
  std::intptr_t null_copy_fn = 0x0;
  std::intptr_t null_delete_fn = 0x0;
  std::intptr_t dup_fn = 0xD;
};

// The shipped integer-constant table, all families combined.
std::span<const ConstantDef> standard_constant_table();

// Checks uniqueness across all families, sentinel negativity, power-of-two
// flags, the 32767 magnitude cap (string lengths exempt), and SUCCESS == 0.
// Returns one message per violation, naming the offending constants;
// empty for a conforming table.
std::vector<std::string> validate_constant_table(std::span<const ConstantDef> table);

// Convenience: validates the shipped table.
std::vector<std::string> validate_constant_tables();

}  // namespace mpiabi
