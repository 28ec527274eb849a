#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hocqc/errors.hpp"

namespace hocqc {

/// Lattice site index xi in Lambda = {-N+1, ..., N}.
using Site = long;

enum class PotentialKind { harmonic, lennard_jones, user };

/// Pair potential phi with derivatives up to third order.
class PairPotential {
public:
    /// Evaluator for phi^(order)(r), order in 0..3.
    using Evaluator = std::function<double(double r, int order)>;

    /// phi(r) = (r - 1)^2 / 2.
    static PairPotential harmonic();
    /// phi(r) = r^-12 - 2 r^-6 (minimum -1 at r = 1).
    static PairPotential lennard_jones();
    static PairPotential user(std::string name, Evaluator eval);

    PotentialKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    /// phi^(order)(r). Throws RangeError for order outside 0..3 and
    /// DomainError where the potential is undefined.
    double operator()(double r, int order = 0) const;

    /// Largest relative mismatch between the analytic derivatives of order
    /// 1..3 and central differences of the next-lower order at `probes`.
    double derivative_mismatch(std::span<const double> probes, double step = 1e-5) const;

private:
    PairPotential(PotentialKind kind, std::string name, Evaluator eval);

    PotentialKind kind_;
    std::string name_;
    Evaluator eval_;
};

/// Periodic chain of 2N sites under macroscopic strain F with interaction range R.
class LatticeSystem {
public:
    LatticeSystem(long half_count, double macro_strain, std::vector<int> range, PairPotential potential);

    long half_count() const noexcept { return half_count_; }
    long site_count() const noexcept { return 2 * half_count_; }
    double macro_strain() const noexcept { return macro_strain_; }
    const std::vector<int>& range() const noexcept { return range_; }
    int cutoff() const noexcept { return range_.back(); }
    const PairPotential& potential() const noexcept { return potential_; }
    /// Lattice spacing eps = 1/(2N) in physical units.
    double spacing() const noexcept { return 0.5 / static_cast<double>(half_count_); }

    Site first_site() const noexcept { return -half_count_ + 1; }
    Site last_site() const noexcept { return half_count_; }

    /// Storage index 0..2N-1 of a site, after periodic reduction into Lambda.
    std::size_t index(Site xi) const noexcept;
    /// Site of a storage index.
    Site site(std::size_t index) const noexcept { return static_cast<Site>(index) + first_site(); }
    /// Reduces any integer into Lambda.
    Site wrap(Site xi) const noexcept;
    /// Reduces a real coordinate into (-N, N].
    double wrap(double x) const noexcept;

    bool in_range(int rho) const noexcept;

    /// phi_rho^(order)(r) = phi^(order)(r + F rho).
    double potential_shifted(int rho, double r, int order = 0) const;

private:
    long half_count_;
    double macro_strain_;
    std::vector<int> range_;
    PairPotential potential_;
};

/// 2N-periodic displacement on Lambda, pinned at site 0 unless built unpinned.
class LatticeFunction {
public:
    /// Zero function.
    explicit LatticeFunction(const LatticeSystem& sys);
    /// Values in storage order; requires values at site 0 to be exactly 0.
    LatticeFunction(const LatticeSystem& sys, std::vector<double> values);
    /// Test fixture constructor: no pin enforced.
    static LatticeFunction unpinned(const LatticeSystem& sys, std::vector<double> values);
    static LatticeFunction from_sites(const LatticeSystem& sys, const std::function<double(Site)>& g);

    double operator()(Site xi) const noexcept { return values_[index(xi)]; }
    double& at(Site xi) noexcept { return values_[index(xi)]; }

    long half_count() const noexcept { return half_count_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool pinned() const noexcept { return pinned_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

private:
    LatticeFunction(long half_count, std::vector<double> values, bool pinned);
    std::size_t index(Site xi) const noexcept;

    long half_count_;
    std::vector<double> values_;
    bool pinned_;
};

/// D_rho u(xi) = u(xi + rho) - u(xi). Throws RangeError unless rho is in +-R.
double finite_difference(const LatticeSystem& sys, const LatticeFunction& u, Site xi, int rho);

/// <f, u>_Lambda = sum over Lambda of f(xi) u(xi); f given in storage order.
double lattice_pairing(std::span<const double> f, const LatticeFunction& u);

enum class LoadKind { singular, smooth, user };

/// Dead load profile on the physical cell [-1/2, 1/2] (x = eps xi).
class ExternalLoad {
public:
    using Profile = std::function<double(double x)>;

    /// f_scale (1/2 - x)/x for x > 0, -f_scale (x + 1/2)/x for x < 0, 0 at x = 0.
    static ExternalLoad singular(double f_scale);
    /// f_scale sin(2 pi m x).
    static ExternalLoad smooth(double f_scale, int mode = 1);
    /// Optional third derivative; a fourth-order difference is used otherwise.
    static ExternalLoad user(Profile profile, Profile third_derivative = {});
    static ExternalLoad zero() { return smooth(0.0); }

    LoadKind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }

    /// Physical profile at x in [-1/2, 1/2] (periodically extended).
    double profile(double x) const;
    /// Third derivative of the physical profile.
    double profile_third_derivative(double x) const;

    /// Load density in lattice units at lattice coordinate x: eps * profile(eps x).
    double density(const LatticeSystem& sys, double x) const;
    /// Third lattice derivative of the density: eps^4 profile'''(eps x).
    double density_third_derivative(const LatticeSystem& sys, double x) const;

private:
    ExternalLoad(LoadKind kind, double scale, Profile profile, Profile third);

    LoadKind kind_;
    double scale_;
    Profile profile_;
    Profile third_;
};

/// Per-site lattice load f(xi) = eps profile(eps xi), storage order; f(0) = 0.
std::vector<double> sample_load(const ExternalLoad& load, const LatticeSystem& sys);

}  // namespace hocqc
