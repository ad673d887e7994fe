#pragma once

#include <cstdint>

#include "mpiabi/backend.hpp"

namespace mpiabi::backend {

// MPICH-style native datatype constants: 0x4c00ssnn, where ss is the byte
// size of the type and nn a sequence number.
namespace int_native {
inline constexpr NativeHandle DATATYPE_NULL = 0x0c000000;
inline constexpr NativeHandle CHAR = 0x4c000101;
inline constexpr NativeHandle UNSIGNED_CHAR = 0x4c000102;
inline constexpr NativeHandle SHORT = 0x4c000203;
inline constexpr NativeHandle UNSIGNED_SHORT = 0x4c000204;
inline constexpr NativeHandle INT = 0x4c000405;
inline constexpr NativeHandle UNSIGNED_INT = 0x4c000406;
inline constexpr NativeHandle LONG = 0x4c000807;
inline constexpr NativeHandle UNSIGNED_LONG = 0x4c000808;
inline constexpr NativeHandle LONG_LONG = 0x4c000809;
inline constexpr NativeHandle FLOAT = 0x4c00040a;
inline constexpr NativeHandle DOUBLE = 0x4c00080b;
inline constexpr NativeHandle SIGNED_CHAR = 0x4c00010c;
inline constexpr NativeHandle UNSIGNED_LONG_LONG = 0x4c00080d;
inline constexpr NativeHandle BYTE = 0x4c00010e;
inline constexpr NativeHandle PACKED = 0x4c00010f;
inline constexpr NativeHandle INT8_T = 0x4c000110;
inline constexpr NativeHandle UINT8_T = 0x4c000111;
inline constexpr NativeHandle INT16_T = 0x4c000212;
inline constexpr NativeHandle UINT16_T = 0x4c000213;
inline constexpr NativeHandle INT32_T = 0x4c000414;
inline constexpr NativeHandle UINT32_T = 0x4c000415;
inline constexpr NativeHandle INT64_T = 0x4c000816;
inline constexpr NativeHandle UINT64_T = 0x4c000817;
inline constexpr NativeHandle AINT = 0x4c000818;
inline constexpr NativeHandle COUNT = 0x4c000819;
inline constexpr NativeHandle OFFSET = 0x4c00081a;

// User-handle allocation starts here, far above both the bit-coded
// predefined patterns' low range and the standard 10-bit region.
inline constexpr NativeHandle kUserHandleBase = 0x2000000;
}  // namespace int_native

// The size of a bit-coded built-in datatype constant, decoded from the
// handle bits alone.
inline constexpr int int_native_type_size(NativeHandle dtype) {
  return static_cast<int>((dtype & 0x0000ff00) >> 8);
}

// True for the 0x4c00ssnn predefined pattern.
inline constexpr bool int_native_is_builtin_datatype(NativeHandle dtype) {
  return (dtype & 0xff000000) == 0x4c000000;
}

}  // namespace mpiabi::backend
