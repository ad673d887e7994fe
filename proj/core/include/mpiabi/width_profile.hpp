#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace mpiabi {

// Width profile of the signed ABI integer types, in the AnOn notation:
// address bits (MPI_Aint), offset bits (MPI_Offset), and count bits
// (MPI_Count), where count is the larger of the other two.
struct AbiWidthProfile {
  int address_bits;
  int offset_bits;
  int count_bits;
};

// Only A32O64 and A64O64 are supported.
inline AbiWidthProfile make_width_profile(int address_bits) {
  if (address_bits != 32 && address_bits != 64)
    throw std::invalid_argument("address width must be 32 or 64 bits");
  constexpr int offset_bits = 64;
  return {address_bits, offset_bits, std::max(address_bits, offset_bits)};
}

inline AbiWidthProfile host_width_profile() {
  return make_width_profile(static_cast<int>(sizeof(std::intptr_t) * 8));
}

}  // namespace mpiabi
