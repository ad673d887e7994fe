#pragma once

#include "mpiabi/backend.hpp"

namespace mpiabi::backend {

// Open-registry-style native constants: handles are opaque keys into the
// backend's object registry, with no information in the bit pattern.
namespace token_native {
// Predefined objects get deterministic tokens from here, in table order.
inline constexpr NativeHandle kPredefinedTokenBase = 1024;
// User-created objects draw from a global counter starting here.
inline constexpr NativeHandle kUserTokenBase = 4096;
}  // namespace token_native

}  // namespace mpiabi::backend
