#include "mpiabi/header_gen.hpp"

#include <fmt/format.h>

#include "mpiabi/constants.hpp"
#include "mpiabi/handles.hpp"

namespace mpiabi {

namespace {

const char* c_type_of(HandleKind kind) {
  switch (kind) {
    case HandleKind::Op: return "MPI_Op";
    case HandleKind::Comm: return "MPI_Comm";
    case HandleKind::Group: return "MPI_Group";
    case HandleKind::Win: return "MPI_Win";
    case HandleKind::File: return "MPI_File";
    case HandleKind::Session: return "MPI_Session";
    case HandleKind::Message: return "MPI_Message";
    case HandleKind::Errhandler: return "MPI_Errhandler";
    case HandleKind::Request: return "MPI_Request";
    case HandleKind::Datatype: return "MPI_Datatype";
  }
  return "MPI_Handle";
}

constexpr const char* kHandleStructs[][2] = {
    {"MPI_Comm", "MPI_ABI_Comm"},
    {"MPI_Datatype", "MPI_ABI_Datatype"},
    {"MPI_Errhandler", "MPI_ABI_Errhandler"},
    {"MPI_File", "MPI_ABI_File"},
    {"MPI_Group", "MPI_ABI_Group"},
    {"MPI_Message", "MPI_ABI_Message"},
    {"MPI_Op", "MPI_ABI_Op"},
    {"MPI_Request", "MPI_ABI_Request"},
    {"MPI_Session", "MPI_ABI_Session"},
    {"MPI_Win", "MPI_ABI_Win"},
};

}  // namespace

std::string generate_c_header() {
  std::string out;
  out += "#ifndef MPI_ABI_H_INCLUDED\n";
  out += "#define MPI_ABI_H_INCLUDED\n\n";
  out += "/* Handles are pointers to distinct incomplete struct types, so\n";
  out += " * assigning across kinds is a compile-time error; the pointer\n";
  out += " * values themselves are small integers from the predefined\n";
  out += " * region, or library-assigned values at or above 1024. */\n\n";

  for (const auto& [alias, tag] : kHandleStructs)
    out += fmt::format("typedef struct {}* {};\n", tag, alias);
  out += "\n";

  for (const PredefinedRow& row : predefined_rows())
    out += fmt::format("#define {} (({})0x{:X})\n", row.name,
                       c_type_of(row.kind), row.value);
  out += "\n";

  for (const ConstantDef& def : standard_constant_table())
    out += fmt::format("#define {} ({})\n", def.name, def.value);
  out += "\n";

  out += "typedef struct {\n";
  out += "    int MPI_SOURCE;\n";
  out += "    int MPI_TAG;\n";
  out += "    int MPI_ERROR;\n";
  out += "    int mpi_abi_reserved_[5];\n";
  out += "} MPI_Status;\n\n";

  out += "#endif /* MPI_ABI_H_INCLUDED */\n";
  return out;
}

}  // namespace mpiabi
