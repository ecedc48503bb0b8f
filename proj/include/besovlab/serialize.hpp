#pragma once

#include "besovlab/grid.hpp"

#include <iosfwd>
#include <string>

namespace besovlab {

// ============================================================================
// Binary grid-function format
// ============================================================================
//
// Layout (all little-endian):
//   magic   "BSVG" (4 bytes)
//   version u32 (currently 1)
//   N       u32
//   L       f64
//   support f64 (NaN when undeclared)
//   values  N*N f64, row-major: values(0,0), values(0,1), ..., values(1,0), ...

void write_grid_function(const GridFunction& f, std::ostream& out);
void write_grid_function(const GridFunction& f, const std::string& path);

GridFunction read_grid_function(std::istream& in);
GridFunction read_grid_function(const std::string& path);

}  // namespace besovlab
