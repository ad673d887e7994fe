#include "mpiabi/handles.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace mpiabi {

namespace {

constexpr std::optional<int> kVar = std::nullopt;

// Appendix tables of the proposed ABI, one entry per enumerated row.
// Kept sorted by value; reserved rows are deliberately absent.
constexpr PredefinedRow kRows[] = {
    // operations (prefix 0b00001)
    {0x020, HandleKind::Op, "MPI_OP_NULL", kVar},
    {0x021, HandleKind::Op, "MPI_SUM", kVar},
    {0x022, HandleKind::Op, "MPI_MIN", kVar},
    {0x023, HandleKind::Op, "MPI_MAX", kVar},
    {0x024, HandleKind::Op, "MPI_PROD", kVar},
    {0x028, HandleKind::Op, "MPI_BAND", kVar},
    {0x029, HandleKind::Op, "MPI_BOR", kVar},
    {0x02A, HandleKind::Op, "MPI_BXOR", kVar},
    {0x030, HandleKind::Op, "MPI_LAND", kVar},
    {0x031, HandleKind::Op, "MPI_LOR", kVar},
    {0x032, HandleKind::Op, "MPI_LXOR", kVar},
    {0x038, HandleKind::Op, "MPI_MINLOC", kVar},
    {0x039, HandleKind::Op, "MPI_MAXLOC", kVar},
    {0x03C, HandleKind::Op, "MPI_REPLACE", kVar},
    {0x03D, HandleKind::Op, "MPI_NO_OP", kVar},
    // opaque kinds (prefix 0b01)
    {0x100, HandleKind::Comm, "MPI_COMM_NULL", kVar},
    {0x101, HandleKind::Comm, "MPI_COMM_WORLD", kVar},
    {0x102, HandleKind::Comm, "MPI_COMM_SELF", kVar},
    {0x104, HandleKind::Group, "MPI_GROUP_NULL", kVar},
    {0x105, HandleKind::Group, "MPI_GROUP_EMPTY", kVar},
    {0x108, HandleKind::Win, "MPI_WIN_NULL", kVar},
    {0x10C, HandleKind::File, "MPI_FILE_NULL", kVar},
    {0x110, HandleKind::Session, "MPI_SESSION_NULL", kVar},
    {0x114, HandleKind::Message, "MPI_MESSAGE_NULL", kVar},
    {0x115, HandleKind::Message, "MPI_MESSAGE_NO_PROC", kVar},
    {0x118, HandleKind::Errhandler, "MPI_ERRHANDLER_NULL", kVar},
    {0x119, HandleKind::Errhandler, "MPI_ERRORS_ARE_FATAL", kVar},
    {0x11A, HandleKind::Errhandler, "MPI_ERRORS_RETURN", kVar},
    {0x11B, HandleKind::Errhandler, "MPI_ERRORS_ABORT", kVar},
    {0x120, HandleKind::Request, "MPI_REQUEST_NULL", kVar},
    // datatypes (prefix 0b10); variable-size first
    {0x200, HandleKind::Datatype, "MPI_DATATYPE_NULL", kVar},
    {0x201, HandleKind::Datatype, "MPI_AINT", kVar},
    {0x202, HandleKind::Datatype, "MPI_COUNT", kVar},
    {0x203, HandleKind::Datatype, "MPI_OFFSET", kVar},
    {0x207, HandleKind::Datatype, "MPI_PACKED", kVar},
    {0x208, HandleKind::Datatype, "MPI_SHORT", kVar},
    {0x209, HandleKind::Datatype, "MPI_INT", kVar},
    {0x20A, HandleKind::Datatype, "MPI_LONG", kVar},
    {0x20B, HandleKind::Datatype, "MPI_LONG_LONG", kVar},
    {0x20C, HandleKind::Datatype, "MPI_UNSIGNED_SHORT", kVar},
    {0x20D, HandleKind::Datatype, "MPI_UNSIGNED_INT", kVar},
    {0x20E, HandleKind::Datatype, "MPI_UNSIGNED_LONG", kVar},
    {0x20F, HandleKind::Datatype, "MPI_UNSIGNED_LONG_LONG", kVar},
    {0x210, HandleKind::Datatype, "MPI_FLOAT", kVar},
    // fixed-size datatypes (prefix 0b1001, log2 size in bits 3-5)
    {0x240, HandleKind::Datatype, "MPI_INT8_T", 1},
    {0x241, HandleKind::Datatype, "MPI_UINT8_T", 1},
    {0x243, HandleKind::Datatype, "MPI_CHAR", 1},
    {0x244, HandleKind::Datatype, "MPI_SIGNED_CHAR", 1},
    {0x245, HandleKind::Datatype, "MPI_UNSIGNED_CHAR", 1},
    {0x247, HandleKind::Datatype, "MPI_BYTE", 1},
    {0x248, HandleKind::Datatype, "MPI_INT16_T", 2},
    {0x249, HandleKind::Datatype, "MPI_UINT16_T", 2},
    {0x250, HandleKind::Datatype, "MPI_INT32_T", 4},
    {0x251, HandleKind::Datatype, "MPI_UINT32_T", 4},
    {0x258, HandleKind::Datatype, "MPI_INT64_T", 8},
    {0x259, HandleKind::Datatype, "MPI_UINT64_T", 8},
};

struct NullRow {
  HandleKind kind;
  HandleValue value;
};

constexpr NullRow kNulls[] = {
    {HandleKind::Op, 0x020},      {HandleKind::Comm, 0x100},
    {HandleKind::Group, 0x104},   {HandleKind::Win, 0x108},
    {HandleKind::File, 0x10C},    {HandleKind::Session, 0x110},
    {HandleKind::Message, 0x114}, {HandleKind::Errhandler, 0x118},
    {HandleKind::Request, 0x120}, {HandleKind::Datatype, 0x200},
};

const PredefinedRow* find_row(HandleValue value) {
  auto it = std::lower_bound(
      std::begin(kRows), std::end(kRows), value,
      [](const PredefinedRow& row, HandleValue v) { return row.value < v; });
  if (it != std::end(kRows) && it->value == value) return &*it;
  return nullptr;
}

}  // namespace

std::string_view to_string(HandleKind kind) {
  switch (kind) {
    case HandleKind::Op: return "Op";
    case HandleKind::Comm: return "Comm";
    case HandleKind::Group: return "Group";
    case HandleKind::Win: return "Win";
    case HandleKind::File: return "File";
    case HandleKind::Session: return "Session";
    case HandleKind::Message: return "Message";
    case HandleKind::Errhandler: return "Errhandler";
    case HandleKind::Request: return "Request";
    case HandleKind::Datatype: return "Datatype";
  }
  return "?";
}

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::Invalid: return "Invalid";
    case Disposition::Reserved: return "Reserved";
    case Disposition::Predefined: return "Predefined";
    case Disposition::UserSpace: return "UserSpace";
  }
  return "?";
}

std::span<const PredefinedRow> predefined_rows() { return kRows; }

HandleClassification classify_handle(HandleValue value) {
  if (value == 0) return {Disposition::Invalid, std::nullopt, std::nullopt};
  if (value < 0 || value >= kPredefinedRegionEnd)
    return {Disposition::UserSpace, std::nullopt, std::nullopt};
  if (const PredefinedRow* row = find_row(value))
    return {Disposition::Predefined, row->kind, row->name};
  return {Disposition::Reserved, std::nullopt, std::nullopt};
}

AbiHandle null_handle_of(HandleKind kind) {
  for (const NullRow& row : kNulls)
    if (row.kind == kind) return {row.value};
  throw std::domain_error("null_handle_of: bad kind");
}

std::optional<int> datatype_fixed_size(AbiHandle handle) {
  HandleValue v = handle.value;
  if ((v >> 8) != 0b10)
    throw std::domain_error("datatype_fixed_size: not a datatype handle");
  if ((v >> 6) != 0b1001) return std::nullopt;  // variable size or NULL
  return 1 << ((v >> 3) & 0x7);
}

AbiHandle lookup_predefined(std::string_view name) {
  for (const PredefinedRow& row : kRows)
    if (row.name == name) return {row.value};
  throw std::out_of_range("lookup_predefined: unknown name " + std::string(name));
}

}  // namespace mpiabi
