#pragma once

#include "atl/stencils.hpp"

namespace atl {

// Eigen-decomposition of a symmetric d x d matrix (d = 2 or 3), eigenvalues
// ascending, vectors[i] the unit eigenvector of values[i].
struct EigenSym {
    std::array<double, 3> values{};
    std::array<Vec, 3> vectors{};
};

// Cyclic Jacobi rotations; converges to ~1e-15 relative at these sizes.
EigenSym eigen_symmetric(const SymMat& s, int dim);

// Largest |eigenvalue|.
double spectral_norm(const SymMat& s, int dim);

}  // namespace atl
