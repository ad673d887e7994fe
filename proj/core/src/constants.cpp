#include "mpiabi/constants.hpp"

#include <map>

namespace mpiabi {

namespace {

using F = ConstantFamily;
namespace c = constants;

constexpr ConstantDef kTable[] = {
    {"MPI_ANY_SOURCE", c::ANY_SOURCE, F::Sentinel},
    {"MPI_ANY_TAG", c::ANY_TAG, F::Sentinel},
    {"MPI_PROC_NULL", c::PROC_NULL, F::Sentinel},
    {"MPI_ROOT", c::ROOT, F::Sentinel},
    {"MPI_UNDEFINED", c::UNDEFINED, F::Sentinel},

    {"MPI_SUCCESS", c::SUCCESS, F::ErrorClass},
    {"MPI_ERR_BUFFER", c::ERR_BUFFER, F::ErrorClass},
    {"MPI_ERR_COUNT", c::ERR_COUNT, F::ErrorClass},
    {"MPI_ERR_TYPE", c::ERR_TYPE, F::ErrorClass},
    {"MPI_ERR_TAG", c::ERR_TAG, F::ErrorClass},
    {"MPI_ERR_COMM", c::ERR_COMM, F::ErrorClass},
    {"MPI_ERR_RANK", c::ERR_RANK, F::ErrorClass},
    {"MPI_ERR_REQUEST", c::ERR_REQUEST, F::ErrorClass},
    {"MPI_ERR_ROOT", c::ERR_ROOT, F::ErrorClass},
    {"MPI_ERR_GROUP", c::ERR_GROUP, F::ErrorClass},
    {"MPI_ERR_OP", c::ERR_OP, F::ErrorClass},
    {"MPI_ERR_TOPOLOGY", c::ERR_TOPOLOGY, F::ErrorClass},
    {"MPI_ERR_DIMS", c::ERR_DIMS, F::ErrorClass},
    {"MPI_ERR_ARG", c::ERR_ARG, F::ErrorClass},
    {"MPI_ERR_UNKNOWN", c::ERR_UNKNOWN, F::ErrorClass},
    {"MPI_ERR_TRUNCATE", c::ERR_TRUNCATE, F::ErrorClass},
    {"MPI_ERR_OTHER", c::ERR_OTHER, F::ErrorClass},
    {"MPI_ERR_INTERN", c::ERR_INTERN, F::ErrorClass},
    {"MPI_ERR_PENDING", c::ERR_PENDING, F::ErrorClass},
    {"MPI_ERR_IN_STATUS", c::ERR_IN_STATUS, F::ErrorClass},

    {"MPI_MODE_NOCHECK", c::MODE_NOCHECK, F::XorFlag},
    {"MPI_MODE_NOSTORE", c::MODE_NOSTORE, F::XorFlag},
    {"MPI_MODE_NOPUT", c::MODE_NOPUT, F::XorFlag},
    {"MPI_MODE_NOPRECEDE", c::MODE_NOPRECEDE, F::XorFlag},
    {"MPI_MODE_NOSUCCEED", c::MODE_NOSUCCEED, F::XorFlag},

    {"MPI_MAX_PROCESSOR_NAME", c::MAX_PROCESSOR_NAME, F::StringLength},
    {"MPI_MAX_ERROR_STRING", c::MAX_ERROR_STRING, F::StringLength},
    {"MPI_MAX_OBJECT_NAME", c::MAX_OBJECT_NAME, F::StringLength},
    {"MPI_MAX_INFO_KEY", c::MAX_INFO_KEY, F::StringLength},
    {"MPI_MAX_INFO_VAL", c::MAX_INFO_VAL, F::StringLength},
    {"MPI_MAX_PORT_NAME", c::MAX_PORT_NAME, F::StringLength},
    {"MPI_MAX_LIBRARY_VERSION_STRING", c::MAX_LIBRARY_VERSION_STRING, F::StringLength},
};

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

std::string_view to_string(ConstantFamily family) {
  switch (family) {
    case F::Sentinel: return "Sentinel";
    case F::XorFlag: return "XorFlag";
    case F::StringLength: return "StringLength";
    case F::ErrorClass: return "ErrorClass";
  }
  return "?";
}

std::span<const ConstantDef> standard_constant_table() { return kTable; }

std::vector<std::string> validate_constant_table(std::span<const ConstantDef> table) {
  std::vector<std::string> report;
  std::map<std::int32_t, std::string_view> seen;
  bool have_success = false;

  for (const ConstantDef& def : table) {
    auto [it, inserted] = seen.emplace(def.value, def.name);
    if (!inserted)
      report.push_back("duplicate value " + std::to_string(def.value) + ": " +
                       std::string(it->second) + " and " + std::string(def.name));

    switch (def.family) {
      case F::Sentinel:
        if (def.value >= 0)
          report.push_back("sentinel " + std::string(def.name) + " is not negative");
        break;
      case F::XorFlag:
        if (!is_power_of_two(def.value))
          report.push_back("flag " + std::string(def.name) + " is not a power of two");
        break;
      case F::StringLength:
        if (def.value <= 0)
          report.push_back("string length " + std::string(def.name) + " is not positive");
        break;
      case F::ErrorClass:
        if (def.name == "MPI_SUCCESS") {
          have_success = true;
          if (def.value != 0)
            report.push_back("MPI_SUCCESS is not zero");
        } else if (def.value <= 0) {
          report.push_back("error class " + std::string(def.name) + " is not positive");
        }
        break;
    }

    if (def.family != F::StringLength &&
        (def.value > 32767 || def.value < -32767))
      report.push_back("constant " + std::string(def.name) +
                       " exceeds magnitude 32767");
  }

  if (!have_success) report.push_back("table lacks MPI_SUCCESS");
  return report;
}

std::vector<std::string> validate_constant_tables() {
  return validate_constant_table(standard_constant_table());
}

}  // namespace mpiabi
