#pragma once

#include "dtnlab/assembly.hpp"
#include "dtnlab/elliptic.hpp"

/// Serial, dense or otherwise independent implementations used to cross-check
/// the OpenMP/sparse kernels in tests and benchmarks.
namespace dtnlab::reference {

/// Stiffness with gradients from the inverse-transpose Jacobian of the
/// reference map, accumulated serially.
SparseOperator assemble_stiffness(const TriangleMesh& mesh, const MetricField& metric);
SparseOperator assemble_mass(const TriangleMesh& mesh, const MetricField& metric, const PotentialField* weight = nullptr);

/// Schur complement from a dense LU of the interior block.
MatX schur_complement(const Discretization& disc, const SparseOperator& op);

/// Dense generalized eigensolve of the interior pencil (all modes; returns
/// the lowest `count`).
EigenSystem eigensystem(const Discretization& disc, const PotentialField& v, int count);

}  // namespace dtnlab::reference
