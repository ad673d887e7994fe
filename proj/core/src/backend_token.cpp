#include "mpiabi/backend_token.hpp"

#include <atomic>

#include "backend_common.hpp"

namespace mpiabi::backend {

namespace {

BackendDescriptor make_descriptor() {
  BackendDescriptor d;
  d.name = "token";
  d.status_layout = kTokenStatusLayout;
  // Predefined objects get deterministic registry keys in table order; the
  // key carries no information about the object.
  NativeHandle next = token_native::kPredefinedTokenBase;
  for (const PredefinedRow& row : predefined_rows()) {
    NativeHandle token = next++;
    d.std_to_native[row.value] = token;
    d.native_to_std[token] = row.value;
  }
  for (const ConstantDef& def : standard_constant_table()) {
    if (def.family != ConstantFamily::ErrorClass || def.value == 0) continue;
    int native = 2000 + def.value;
    d.class_to_native[def.value] = native;
    d.native_to_class[native] = def.value;
  }
  d.native_any_source = -1;
  d.native_any_tag = -2;
  d.native_undefined = -3;
  return d;
}

std::atomic<NativeHandle> g_next_token{token_native::kUserTokenBase};

class TokenBackend final : public SimBackendBase {
 public:
  explicit TokenBackend(sim::Engine& engine)
      : SimBackendBase(engine, make_descriptor()) {
    install_predefined_objects();
  }

  // No size in the token bits: everything goes through the registry record.
  int type_size(NativeHandle dtype, std::int64_t* size) override {
    const ObjRef* rec = find(dtype, ObjKind::Datatype);
    if (!rec) return native_of_class(constants::ERR_TYPE);
    *size = rec->dtype_size;
    return 0;
  }

 protected:
  NativeHandle allocate_user_handle(ObjKind) override {
    return g_next_token.fetch_add(1, std::memory_order_relaxed);
  }
};

}  // namespace

std::shared_ptr<BackendApi> make_token_backend(sim::Engine& engine) {
  return std::make_shared<TokenBackend>(engine);
}

}  // namespace mpiabi::backend
