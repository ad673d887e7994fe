#include <doctest.h>

#include "mpiabi/backend.hpp"

using namespace mpiabi;
using namespace mpiabi::backend;

TEST_CASE("repeat activation returns the same instance") {
  sim::Engine engine(1);
  auto a = backend_registry_get("int", engine);
  auto b = backend_registry_get("int", engine);
  CHECK(a.get() == b.get());
}

TEST_CASE("different names and engines get different instances") {
  sim::Engine e1(1), e2(1);
  auto a = backend_registry_get("int", e1);
  auto b = backend_registry_get("token", e1);
  auto c = backend_registry_get("int", e2);
  CHECK(a.get() != b.get());
  CHECK(a.get() != c.get());
  CHECK(a->descriptor().name == "int");
  CHECK(b->descriptor().name == "token");
}

TEST_CASE("unknown names are rejected") {
  sim::Engine engine(1);
  CHECK_THROWS_AS(backend_registry_get("mpich", engine), std::out_of_range);
  CHECK_THROWS_AS(backend_registry_get("", engine), std::out_of_range);
}

TEST_CASE("the environment key is the documented one") {
  CHECK(std::string_view(kBackendEnvKey) == "ABI_BRIDGE_BACKEND");
}
