#pragma once

#include <cstdint>
#include <stdexcept>

namespace mpiabi {

// The standard 32-byte status record: three public slots followed by five
// reserved ones.  Count and the cancelled flag live in the reserved space;
// count is split across slot 3 (low 32 bits) and the low 31 bits of slot 4,
// with the cancelled flag in bit 31 of slot 4.
struct AbiStatus {
  std::int32_t slots[8] = {0, 0, 0, 0, 0, 0, 0, 0};

  static constexpr int kSourceSlot = 0;
  static constexpr int kTagSlot = 1;
  static constexpr int kErrorSlot = 2;
  static constexpr int kCountLoSlot = 3;
  static constexpr int kCountHiSlot = 4;

  std::int32_t source() const { return slots[kSourceSlot]; }
  std::int32_t tag() const { return slots[kTagSlot]; }
  std::int32_t error() const { return slots[kErrorSlot]; }
  void set_source(std::int32_t v) { slots[kSourceSlot] = v; }
  void set_tag(std::int32_t v) { slots[kTagSlot] = v; }
  void set_error(std::int32_t v) { slots[kErrorSlot] = v; }

  std::int64_t count() const {
    std::uint64_t lo = static_cast<std::uint32_t>(slots[kCountLoSlot]);
    std::uint64_t hi = static_cast<std::uint32_t>(slots[kCountHiSlot]) & 0x7FFFFFFFu;
    return static_cast<std::int64_t>(lo | (hi << 32));
  }

  void set_count(std::uint64_t v) {
    if (v >= (std::uint64_t{1} << 63))
      throw std::out_of_range("status count does not fit in 63 bits");
    slots[kCountLoSlot] = static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
    std::uint32_t hi = static_cast<std::uint32_t>(v >> 32) & 0x7FFFFFFFu;
    std::uint32_t cancel = static_cast<std::uint32_t>(slots[kCountHiSlot]) & 0x80000000u;
    slots[kCountHiSlot] = static_cast<std::int32_t>(hi | cancel);
  }

  bool cancelled() const {
    return (static_cast<std::uint32_t>(slots[kCountHiSlot]) >> 31) != 0;
  }

  void set_cancelled(bool c) {
    std::uint32_t w = static_cast<std::uint32_t>(slots[kCountHiSlot]) & 0x7FFFFFFFu;
    if (c) w |= 0x80000000u;
    slots[kCountHiSlot] = static_cast<std::int32_t>(w);
  }
};

static_assert(sizeof(AbiStatus) == 32);

}  // namespace mpiabi
