#include <map>
#include <mutex>
#include <stdexcept>

#include "backend_common.hpp"

namespace mpiabi::backend {

namespace {
std::mutex g_mu;
// weak_ptr so an entry dies with its last user; a later engine that happens
// to reuse the address gets a fresh backend, not stale sim ids.
std::map<std::pair<std::string, sim::Engine*>, std::weak_ptr<BackendApi>> g_cache;
}  // namespace

std::shared_ptr<BackendApi> backend_registry_get(std::string_view name,
                                                 sim::Engine& engine) {
  std::lock_guard lock(g_mu);
  auto key = std::make_pair(std::string(name), &engine);
  auto it = g_cache.find(key);
  if (it != g_cache.end()) {
    if (auto live = it->second.lock()) return live;
    g_cache.erase(it);
  }

  std::shared_ptr<BackendApi> backend;
  if (name == "int") {
    backend = make_int_backend(engine);
  } else if (name == "token") {
    backend = make_token_backend(engine);
  } else {
    throw std::out_of_range("unknown backend: " + std::string(name));
  }
  g_cache[key] = backend;
  return backend;
}

}  // namespace mpiabi::backend
