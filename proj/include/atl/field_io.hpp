#pragma once

#include <string>
#include <vector>

#include "atl/grid.hpp"
#include "atl/regularity.hpp"

namespace atl {

// Node dump with header "i,j,x,y,value" (2D) or "i,j,k,x,y,z,value" (3D),
// one row per node in storage order. Doubles are printed with enough digits
// to reload exactly; never-arrived entries are the literal "nan".
void write_field_csv(const ScalarField& f, const std::string& path);

// Rebuilds the field from a dump produced by write_field_csv. The grid is
// recovered from the index/coordinate columns; duplicate or missing nodes
// are rejected.
ScalarField read_field_csv(const std::string& path);

// Legacy ASCII VTK structured-points dump for external viewers. The format
// wants the x index varying fastest, so rows are reordered on the way out.
void write_field_vtk(const ScalarField& f, const std::string& path);

// Critical point table: grid index, location, the first `dim` eigenvalues in
// ascending order, the matched class and both residuals.
void write_critical_points_csv(const std::vector<CriticalPointRecord>& pts, int dim,
                               const std::string& path);

}  // namespace atl
