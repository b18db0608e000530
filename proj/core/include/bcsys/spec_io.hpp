#pragma once

#include <string>

#include "bcsys/system_spec.hpp"

namespace bcsys {

// Document format: JSON object with exactly the keys
//   n, m, P2, P1, P0, H, WB1, WB2, WC
// Matrices are nested arrays; a complex scalar is either a plain number
// (imaginary part 0) or a two-element array [re, im]. P0 and H are
// coefficient objects {"kind": ..., "coeffs": [...]} with kind one of
// "constant", "polynomial", "piecewise-constant" (the latter adds
// "breakpoints"). WB2 is [] when m = 2n.
//
// Unknown or missing keys raise SchemaError; shape inconsistencies raise
// DimensionError.
SystemSpec parse_spec(const std::string& document);
SystemSpec parse_spec_file(const std::string& path);  // IoError on read failure

std::string emit_spec(const SystemSpec& spec);
void emit_spec_file(const SystemSpec& spec, const std::string& path);

}  // namespace bcsys
