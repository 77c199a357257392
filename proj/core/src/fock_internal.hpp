// Internal helpers shared between the Fock-engine translation units.

#pragma once

#include <vector>

#include "piston/fock.hpp"

namespace piston::fock {

/// In-place v <- exp(-i H t) v with adaptive Krylov substeps; per-substep
/// error budget tol * (dt / |t|).
void krylov_propagate(const SparseOperator& H, std::vector<cplx>& v, double t, double tol);

/// Expectation of a named observable in a single normalized branch.
double branch_expectation(const Basis& basis, const std::vector<cplx>& v,
                          const std::string& name, const SystemParams& params);

}  // namespace piston::fock
