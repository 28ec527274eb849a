#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hocqc/fem.hpp"
#include "hocqc/lattice.hpp"

namespace hocqc {

/// Periodic quintic spline (C^4) through `values` at the mesh nodes. Returns
/// first and second derivatives at every node.
std::pair<std::vector<double>, std::vector<double>> periodic_quintic_spline(const Mesh1D& mesh,
                                                                            std::span<const double> values);

/// Node values taken from `values`; Hermite derivative DOFs from the periodic
/// quintic spline through all node values. Affine elements stay P1.
MixedFEFunction interpolate_spline(std::shared_ptr<const MixedFESpace> space, std::span<const double> values);

/// Pi u on a canonical (unit) mixed space.
MixedFEFunction interpolate_mixed_Pi(const LatticeFunction& u, std::shared_ptr<const MixedFESpace> space);
/// Pi_h u on a coarse space: u is matched at the representative atoms only.
MixedFEFunction interpolate_coarse_Pi_h(const LatticeFunction& u, std::shared_ptr<const MixedFESpace> space);

}  // namespace hocqc
