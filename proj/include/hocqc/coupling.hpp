#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hocqc/banded.hpp"
#include "hocqc/continuum.hpp"
#include "hocqc/domain.hpp"
#include "hocqc/fem.hpp"
#include "hocqc/lattice.hpp"
#include "hocqc/newton.hpp"

namespace hocqc {

enum class BlendProfile {
    smoothstep,  ///< 6t^5 - 15t^4 + 10t^3 across each shell
    zero,        ///< beta = 0 everywhere (reduction fixture)
    one,         ///< beta = 1 everywhere (reduction fixture)
};

class BlendFunction {
public:
    explicit BlendFunction(const DomainDecomposition& dd, BlendProfile profile = BlendProfile::smoothstep);

    /// beta, beta', beta'', beta''' at x.
    std::array<double, 4> operator()(double x) const noexcept;
    double value(double x) const noexcept { return (*this)(x)[0]; }

    const DomainDecomposition& decomposition() const noexcept { return dd_; }
    BlendProfile profile() const noexcept { return profile_; }

private:
    DomainDecomposition dd_;
    BlendProfile profile_;
};

BlendFunction build_blend(const DomainDecomposition& dd);

/// How the site weight (1 - beta) is attached to a bond (xi, xi + rho) in the
/// energy-based methods.
enum class BondWeighting {
    symmetric,  ///< mean of (1 - beta) at both ends
    left_site,  ///< (1 - beta(xi)) on every bond from xi
};

/// B-QCE and B-QCF on lattice vectors (storage order, length 2N).
class LatticeCoupling {
public:
    LatticeCoupling(const LatticeSystem& sys, BlendFunction blend, BondWeighting weighting = BondWeighting::symmetric);

    double energy_bqce(std::span<const double> u) const;
    std::vector<double> gradient_bqce(std::span<const double> u) const;
    BandMatrix hessian_bqce(std::span<const double> u) const;

    /// <dE^a(u), (1 - beta) v> + <dE^cb(u), Q(beta v)> for each site basis v; no load.
    std::vector<double> residual_bqcf(std::span<const double> u) const;
    BandMatrix jacobian_bqcf(std::span<const double> u) const;

    const std::vector<double>& site_beta() const noexcept { return beta_; }

private:
    double bond_weight(std::size_t i, std::size_t j) const noexcept;

    const LatticeSystem* sys_;
    BlendFunction blend_;
    BondWeighting weighting_;
    std::vector<double> beta_;
};

/// B-QHOCE and B-QHOCF on a mixed P1 / quintic space.
class MixedCoupling {
public:
    MixedCoupling(const LatticeSystem& sys, BlendFunction blend, std::shared_ptr<const MixedFESpace> space,
                  BondWeighting weighting = BondWeighting::symmetric, int quadrature_order = 6);

    const std::shared_ptr<const MixedFESpace>& space() const noexcept { return space_; }

    double energy_bqhoce(std::span<const double> c) const;
    std::vector<double> gradient_bqhoce(std::span<const double> c) const;
    BandMatrix hessian_bqhoce(std::span<const double> c) const;
    /// Coefficients of the external energy <f,u>_{Lambda_a} + (f,u)_{Omega_b u Omega_c}.
    std::vector<double> external_bqhoce(const ExternalLoad& load) const;

    /// <dE^a(u), (1 - beta) v> + <dE^hoc(u), beta v> for each basis function v; no load.
    std::vector<double> residual_bqhocf(std::span<const double> c) const;
    BandMatrix jacobian_bqhocf(std::span<const double> c) const;
    /// <f, (1 - beta) v>_Lambda + (f, beta v).
    std::vector<double> load_bqhocf(const ExternalLoad& load) const;

private:
    struct Bond {
        PointFunctional a;  // u(xi)
        PointFunctional b;  // u(xi + rho)
        int rho;
        double w_energy;    // bond weight in the energy
        double wa;          // 1 - beta(xi)
        double wb;          // 1 - beta(xi + rho)
    };

    double bond_difference(const Bond& bond, std::span<const double> c) const noexcept;
    MixedFEFunction field(std::span<const double> c) const;

    const LatticeSystem* sys_;
    BlendFunction blend_;
    std::shared_ptr<const MixedFESpace> space_;
    QuadratureRule rule_;
    std::vector<Bond> bonds_;
    std::vector<std::pair<Site, PointFunctional>> sites_;  // every lattice site
};

enum class Method { atomistic, cb, hoc, bqce, bqcf, bqhoce, bqhocf };

const char* method_name(Method m) noexcept;
Method parse_method(const std::string& name);
/// True for methods whose unknown lives in the mixed FE space.
bool method_uses_mixed_space(Method m) noexcept;

struct CouplingOptions {
    BondWeighting weighting = BondWeighting::symmetric;
    BlendProfile blend = BlendProfile::smoothstep;
    double target_h = 1.0;  ///< element size in Omega_c for B-QHOCE / B-QHOCF
    int quadrature_order = 6;
    LoadMode load_mode = LoadMode::quadrature;  ///< pure CB / HOC only
};

/// Solution of any method: lattice vector for atomistic / B-QCE / B-QCF,
/// FE field otherwise.
struct CoupledSolution {
    Method method = Method::atomistic;
    std::optional<LatticeFunction> lattice;
    std::optional<MixedFEFunction> field;
    SolveReport report;

    /// FE view: P1 interpolant for lattice solutions.
    MixedFEFunction as_field(const LatticeSystem& sys) const;
};

CoupledSolution solve_coupled(Method method, const LatticeSystem& sys, const DomainDecomposition& dd,
                              const ExternalLoad& load, const NewtonConfig& cfg = {},
                              const CouplingOptions& opt = {});

struct GhostForce {
    double l2 = 0.0;
    double dual = 0.0;
};

/// Residual at u = 0 with f = 0: l2 norm over free DOFs and sqrt(g^T L^-1 g),
/// L the pinned nearest-neighbour Laplacian (lattice) or H1 stiffness (FE).
GhostForce ghost_force_diagnostic(Method method, const LatticeSystem& sys, const DomainDecomposition& dd,
                                  const CouplingOptions& opt = {});

}  // namespace hocqc
