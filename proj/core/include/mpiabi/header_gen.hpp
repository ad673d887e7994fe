#pragma once

#include <string>

namespace mpiabi {

// Renders a standalone C header declaring the handle types as incomplete
// struct pointers, every predefined handle as a cast integer literal, the
// integer constants, and the 32-byte status struct.  Output is byte-stable
// across runs.
std::string generate_c_header();

}  // namespace mpiabi
