#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hocqc/domain.hpp"
#include "hocqc/lattice.hpp"

namespace hocqc {

enum class ElementKind { affine, quintic };

/// Periodic 1D mesh over one period of 2N lattice units. Node positions are
/// integers (lattice sites) stored in increasing order inside (-N, N];
/// element e spans [node e, node e+1], the last one wrapping across the period.
class Mesh1D {
public:
    Mesh1D(long half_count, std::vector<long> nodes, std::vector<ElementKind> kinds,
           std::optional<DomainDecomposition> decomposition = std::nullopt);

    long half_count() const noexcept { return half_count_; }
    double period() const noexcept { return 2.0 * static_cast<double>(half_count_); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t element_count() const noexcept { return nodes_.size(); }
    const std::vector<long>& nodes() const noexcept { return nodes_; }
    long node(std::size_t k) const noexcept { return nodes_[k]; }
    ElementKind kind(std::size_t e) const noexcept { return kinds_[e]; }
    const std::optional<DomainDecomposition>& decomposition() const noexcept { return decomposition_; }

    /// Left endpoint (unwrapped) and size of element e.
    double left(std::size_t e) const noexcept { return static_cast<double>(nodes_[e]); }
    double size(std::size_t e) const noexcept;

    bool all_affine() const noexcept;
    bool all_quintic() const noexcept;
    bool is_unit() const noexcept;

    /// Node index holding site xi (after periodic reduction), if any.
    std::optional<std::size_t> node_at(Site xi) const noexcept;
    /// Element containing x and the local coordinate t in [0,1).
    std::pair<std::size_t, double> locate(double x) const noexcept;

private:
    long half_count_;
    std::vector<long> nodes_;
    std::vector<ElementKind> kinds_;
    std::optional<DomainDecomposition> decomposition_;
};

/// Unit elements; affine inside Omega_a, quintic elsewhere.
Mesh1D build_canonical_mesh(const LatticeSystem& sys, const DomainDecomposition& dd);
/// Unit elements everywhere, all of one kind.
Mesh1D build_uniform_mesh(const LatticeSystem& sys, ElementKind kind);
/// Unit elements on Omega_a and Omega_b, roughly uniform elements of size
/// target_h on each half of Omega_c with lattice-aligned nodes.
Mesh1D build_coarse_mesh(const LatticeSystem& sys, const DomainDecomposition& dd, double target_h);

/// Gauss-Legendre rule mapped to [0,1].
class QuadratureRule {
public:
    explicit QuadratureRule(int n = 6);
    int order() const noexcept { return static_cast<int>(points_.size()); }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// d^order/dt^order of the six reference Hermite quintics on [0,1]
/// (value, first and second derivative at t = 0, then at t = 1).
std::array<double, 6> hermite_reference(double t, int order);

/// Evaluates the quintic with endpoint data (u0, u0', u0'', u1, u1', u1'')
/// on an element of size h at local offset x in [0, h]. Order 0..5.
double hermite_quintic_eval(double h, std::span<const double, 6> coeffs, double x, int order);

/// d^order/dx^order of the local basis of an element of size h at local
/// coordinate t. Affine elements fill two entries; quintic elements six.
std::array<double, 6> element_basis(ElementKind kind, double h, double t, int order);

/// Sparse linear functional u -> u(x): at most six (dof, weight) pairs.
struct PointFunctional {
    int count = 0;
    std::array<std::size_t, 6> dof{};
    std::array<double, 6> weight{};
};

/// Mixed P1 / quintic Hermite space on a mesh. Nodes touching a quintic
/// element carry (u, u', u''); the others carry u only. The value DOF at
/// x = 0 is pinned.
class MixedFESpace {
public:
    explicit MixedFESpace(Mesh1D mesh);

    const Mesh1D& mesh() const noexcept { return mesh_; }
    std::size_t dof_count() const noexcept { return dof_count_; }
    std::size_t free_dof_count() const noexcept { return dof_count_ - 1; }
    std::size_t pinned_dof() const noexcept { return pin_; }
    bool hermite(std::size_t node) const noexcept { return multiplicity_[node] == 3; }
    std::size_t node_dof(std::size_t node) const noexcept { return offset_[node]; }
    std::size_t hermite_node_count() const noexcept;

    /// Global indices of the element's local DOFs (2 for affine, 6 for quintic).
    std::span<const std::size_t> element_dofs(std::size_t e) const noexcept;

    /// u -> u(x) (order 0) or its derivatives, as a sparse functional.
    PointFunctional functional(double x, int order = 0) const;
    /// Largest cyclic distance between DOFs sharing an element.
    std::size_t coupling_width() const noexcept { return width_; }

private:
    Mesh1D mesh_;
    std::vector<int> multiplicity_;
    std::vector<std::size_t> offset_;
    std::vector<std::vector<std::size_t>> element_dofs_;
    std::size_t dof_count_ = 0;
    std::size_t pin_ = 0;
    std::size_t width_ = 0;
};

class MixedFEFunction {
public:
    MixedFEFunction(std::shared_ptr<const MixedFESpace> space, std::vector<double> coeffs);
    static MixedFEFunction zero(std::shared_ptr<const MixedFESpace> space);

    const MixedFESpace& space() const noexcept { return *space_; }
    std::shared_ptr<const MixedFESpace> space_ptr() const noexcept { return space_; }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    std::vector<double>& coeffs() noexcept { return coeffs_; }

    /// d^order u / dx^order at x; derivatives are one-sided (from the right) at nodes.
    double operator()(double x, int order = 0) const;
    /// Same, inside element e at local coordinate t.
    double on_element(std::size_t e, double t, int order) const;
    /// Derivative jump [u^(order)] at node k (right limit minus left limit).
    double jump(std::size_t node, int order) const;

private:
    std::shared_ptr<const MixedFESpace> space_;
    std::vector<double> coeffs_;
};

/// Nodal P1 interpolant on an all-affine space; node_values indexed by mesh node.
MixedFEFunction interpolate_P1(std::shared_ptr<const MixedFESpace> space, std::span<const double> node_values);
/// Q u on the canonical all-affine mesh.
MixedFEFunction interpolate_P1(const LatticeSystem& sys, const LatticeFunction& u);

/// Sum over elements and quadrature points of w h f(x).
double integrate(const QuadratureRule& rule, const Mesh1D& mesh, const std::function<double(double)>& f);

}  // namespace hocqc
