#pragma once

#include <span>
#include <utility>
#include <vector>

#include "hocqc/banded.hpp"
#include "hocqc/lattice.hpp"
#include "hocqc/newton.hpp"

namespace hocqc {

// Storage-order vectors (length 2N) are accepted throughout so that the
// coupled methods can reuse the same kernels.

/// E^a(u) = sum over xi in Lambda, rho in R of phi_rho(D_rho u(xi)).
double energy_atomistic(const LatticeSystem& sys, std::span<const double> u);
double energy_atomistic(const LatticeSystem& sys, const LatticeFunction& u);

/// dE^a/du(eta) for every site, pinned site included.
std::vector<double> gradient_atomistic(const LatticeSystem& sys, std::span<const double> u);
std::vector<double> gradient_atomistic(const LatticeSystem& sys, const LatticeFunction& u);

/// Symmetric band matrix of half-bandwidth max(R); no pin applied.
BandMatrix hessian_atomistic(const LatticeSystem& sys, std::span<const double> u);
BandMatrix hessian_atomistic(const LatticeSystem& sys, const LatticeFunction& u);

/// Periodic nearest-neighbour Laplacian on n sites (diagonal 2, off-diagonal -1).
BandMatrix nearest_neighbor_laplacian(std::size_t n);

/// Minimizes E^a(u) - <f,u> from u = 0 with u(0) = 0 held fixed.
std::pair<LatticeFunction, SolveReport> solve_atomistic(const LatticeSystem& sys, std::span<const double> load,
                                                       const NewtonConfig& cfg = {});
std::pair<LatticeFunction, SolveReport> solve_atomistic(const LatticeSystem& sys, const ExternalLoad& load,
                                                       const NewtonConfig& cfg = {});

/// min over v with v(0) = 0 of <H(u) v, v> / <L v, v>, L the nearest-neighbour Laplacian.
double stability_margin(const LatticeSystem& sys, const LatticeFunction& u);

}  // namespace hocqc
