#include "mpiabi/backend_int.hpp"

#include <atomic>

#include "backend_common.hpp"

namespace mpiabi::backend {

namespace {

namespace n = int_native;

// Non-datatype native constants, in the same bit-coded spirit: the high
// byte encodes the object class, predefined instances count up from zero.
constexpr NativeHandle kCommNull = 0x04000000;
constexpr NativeHandle kCommWorld = 0x44000000;
constexpr NativeHandle kCommSelf = 0x44000001;
constexpr NativeHandle kGroupNull = 0x08000000;
constexpr NativeHandle kGroupEmpty = 0x48000000;
constexpr NativeHandle kWinNull = 0x20000000;
constexpr NativeHandle kFileNull = 0x1c000000;
constexpr NativeHandle kSessionNull = 0x34000000;
constexpr NativeHandle kMessageNull = 0x30000000;
constexpr NativeHandle kMessageNoProc = 0x70000000;
constexpr NativeHandle kErrhandlerNull = 0x14000000;
constexpr NativeHandle kErrorsAreFatal = 0x54000000;
constexpr NativeHandle kErrorsReturn = 0x54000001;
constexpr NativeHandle kErrorsAbort = 0x54000002;
constexpr NativeHandle kOpNull = 0x18000000;
constexpr NativeHandle kRequestNull = 0x2c000000;

struct Pair {
  HandleValue std_value;
  NativeHandle native;
};

constexpr Pair kPairs[] = {
    {0x020, kOpNull},
    {0x021, 0x58000003},  // SUM
    {0x022, 0x58000002},  // MIN
    {0x023, 0x58000001},  // MAX
    {0x024, 0x58000004},  // PROD
    {0x028, 0x58000006},  // BAND
    {0x029, 0x58000008},  // BOR
    {0x02A, 0x5800000a},  // BXOR
    {0x030, 0x58000005},  // LAND
    {0x031, 0x58000007},  // LOR
    {0x032, 0x58000009},  // LXOR
    {0x038, 0x5800000b},  // MINLOC
    {0x039, 0x5800000c},  // MAXLOC
    {0x03C, 0x5800000d},  // REPLACE
    {0x03D, 0x5800000e},  // NO_OP
    {0x100, kCommNull},
    {0x101, kCommWorld},
    {0x102, kCommSelf},
    {0x104, kGroupNull},
    {0x105, kGroupEmpty},
    {0x108, kWinNull},
    {0x10C, kFileNull},
    {0x110, kSessionNull},
    {0x114, kMessageNull},
    {0x115, kMessageNoProc},
    {0x118, kErrhandlerNull},
    {0x119, kErrorsAreFatal},
    {0x11A, kErrorsReturn},
    {0x11B, kErrorsAbort},
    {0x120, kRequestNull},
    {0x200, n::DATATYPE_NULL},
    {0x201, n::AINT},
    {0x202, n::COUNT},
    {0x203, n::OFFSET},
    {0x207, n::PACKED},
    {0x208, n::SHORT},
    {0x209, n::INT},
    {0x20A, n::LONG},
    {0x20B, n::LONG_LONG},
    {0x20C, n::UNSIGNED_SHORT},
    {0x20D, n::UNSIGNED_INT},
    {0x20E, n::UNSIGNED_LONG},
    {0x20F, n::UNSIGNED_LONG_LONG},
    {0x210, n::FLOAT},
    {0x240, n::INT8_T},
    {0x241, n::UINT8_T},
    {0x243, n::CHAR},
    {0x244, n::SIGNED_CHAR},
    {0x245, n::UNSIGNED_CHAR},
    {0x247, n::BYTE},
    {0x248, n::INT16_T},
    {0x249, n::UINT16_T},
    {0x250, n::INT32_T},
    {0x251, n::UINT32_T},
    {0x258, n::INT64_T},
    {0x259, n::UINT64_T},
};

BackendDescriptor make_descriptor() {
  BackendDescriptor d;
  d.name = "int";
  d.status_layout = kIntStatusLayout;
  for (const Pair& p : kPairs) {
    d.std_to_native[p.std_value] = p.native;
    d.native_to_std[p.native] = p.std_value;
  }
  // Native error codes are class*4+1, as in encoded-ring-and-index schemes;
  // success stays zero.
  for (const ConstantDef& def : standard_constant_table()) {
    if (def.family != ConstantFamily::ErrorClass || def.value == 0) continue;
    int native = def.value * 4 + 1;
    d.class_to_native[def.value] = native;
    d.native_to_class[native] = def.value;
  }
  d.native_any_source = -2;
  d.native_any_tag = -1;
  d.native_undefined = -32766;
  return d;
}

std::atomic<NativeHandle> g_next_handle{n::kUserHandleBase};

class IntBackend final : public SimBackendBase {
 public:
  explicit IntBackend(sim::Engine& engine)
      : SimBackendBase(engine, make_descriptor()) {
    install_predefined_objects();
  }

  int type_size(NativeHandle dtype, std::int64_t* size) override {
    if (int_native_is_builtin_datatype(dtype)) {
      *size = int_native_type_size(dtype);
      return 0;
    }
    const ObjRef* rec = find(dtype, ObjKind::Datatype);
    if (!rec) return native_of_class(constants::ERR_TYPE);
    *size = rec->dtype_size;
    return 0;
  }

 protected:
  NativeHandle allocate_user_handle(ObjKind) override {
    return g_next_handle.fetch_add(1, std::memory_order_relaxed);
  }
};

}  // namespace

std::shared_ptr<BackendApi> make_int_backend(sim::Engine& engine) {
  return std::make_shared<IntBackend>(engine);
}

}  // namespace mpiabi::backend
