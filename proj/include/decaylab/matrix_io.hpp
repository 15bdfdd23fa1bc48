#pragma once

#include <string>

#include "decaylab/operator.hpp"

namespace decaylab {

// Binary layout (little-endian):
//   char[4]  "DLOP"
//   uint32   format version (1)
//   uint64   dim
//   uint32   role (index of the Role enumerator)
//   uint64   grid hash
//   dim*dim  (re, im) double pairs, row-major
inline constexpr std::uint32_t kOperatorFormatVersion = 1;

void write_operator_binary(const std::string& path, const HermitianOperator& op);
HermitianOperator read_operator_binary(const std::string& path);

// Text variant: one header line "# dim=<n> role=<name> grid_hash=<hex>", then
// one row per matrix row with re,im pairs separated by commas.
void write_operator_csv(const std::string& path, const HermitianOperator& op);

}  // namespace decaylab
