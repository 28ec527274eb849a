#pragma once

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "hocqc/banded.hpp"
#include "hocqc/fem.hpp"
#include "hocqc/lattice.hpp"
#include "hocqc/newton.hpp"

namespace hocqc {

/// sum_rho rho^order phi_rho^(order)(rho g), order 0..2.
double density_cb(const LatticeSystem& sys, double g, int order = 0);

/// W_hoc(g1, g3) = sum_rho phi_rho(rho g1 + rho^3/24 g3) with partials.
struct HocDensity {
    double value = 0.0;
    double d1 = 0.0;   ///< dW/dg1
    double d3 = 0.0;   ///< dW/dg3
    double d11 = 0.0;
    double d13 = 0.0;
    double d33 = 0.0;
};

enum class DensityOrder { value, grad, hess };

HocDensity density_hoc(const LatticeSystem& sys, double g1, double g3, DensityOrder which = DensityOrder::hess);

enum class ContinuumModel { cb, hoc };

/// beta, beta', beta'', beta''' at x.
using WeightFn = std::function<std::array<double, 4>(double)>;
using ElementFilter = std::function<bool(std::size_t)>;

/// A continuum contribution integral of the form
///   energy:  int w W(u', u''')                 (test_weight = false)
///   force:   int dW(u) . ((w v)', (w v)''')    (test_weight = true)
/// over the elements accepted by `elements` (all if empty). w = 1 if empty.
struct ContinuumForm {
    const LatticeSystem* sys = nullptr;
    ContinuumModel model = ContinuumModel::hoc;
    WeightFn weight;
    bool test_weight = false;
    ElementFilter elements;
};

double continuum_energy(const ContinuumForm& form, const MixedFEFunction& u, const QuadratureRule& rule);
/// Covector of length dof_count (pinned entry included).
std::vector<double> continuum_gradient(const ContinuumForm& form, const MixedFEFunction& u,
                                       const QuadratureRule& rule);
/// Appends the (possibly non-symmetric, for test weights) Jacobian entries.
void continuum_jacobian(const ContinuumForm& form, const MixedFEFunction& u, const QuadratureRule& rule,
                        std::vector<Triplet>& out);

/// int f (w v) over filtered elements, f the lattice-unit load density.
std::vector<double> continuum_load(const MixedFESpace& space, const LatticeSystem& sys, const ExternalLoad& load,
                                   const QuadratureRule& rule, const WeightFn& weight = {},
                                   const ElementFilter& elements = {});

/// E^hoc(u) = int W_hoc(u', u''') over the period.
double energy_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const QuadratureRule& rule = QuadratureRule());
std::vector<double> variation_hoc(const LatticeSystem& sys, const MixedFEFunction& u,
                                  const QuadratureRule& rule = QuadratureRule());
BandMatrix hessian_hoc(const LatticeSystem& sys, const MixedFEFunction& u,
                       const QuadratureRule& rule = QuadratureRule());

/// How continuum solves discretize the external load.
enum class LoadMode {
    quadrature,  ///< int f v with f the continuous profile
    nodal,       ///< lattice samples f(xi) on value DOFs (unit meshes only)
};

/// Pure HOC minimizer on the all-quintic unit mesh.
std::pair<MixedFEFunction, SolveReport> solve_hoc(const LatticeSystem& sys, const ExternalLoad& load,
                                                 const NewtonConfig& cfg = {},
                                                 LoadMode mode = LoadMode::quadrature);
/// Pure CB minimizer on the all-affine unit mesh.
std::pair<MixedFEFunction, SolveReport> solve_cb(const LatticeSystem& sys, const ExternalLoad& load,
                                                const NewtonConfig& cfg = {},
                                                LoadMode mode = LoadMode::quadrature);

/// Closed-form HOC stress; every correction term enters with +.
double stress_hoc(const LatticeSystem& sys, const MixedFEFunction& u, double x);
/// Stress of the weak form, dW/dg1 - (dW/dg3)''; integrates against v' to the HOC variation.
double stress_hoc_weak(const LatticeSystem& sys, const MixedFEFunction& u, double x);

}  // namespace hocqc
