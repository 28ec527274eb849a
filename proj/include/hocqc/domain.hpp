#pragma once

#include <vector>

#include "hocqc/lattice.hpp"

namespace hocqc {

enum class Region { atomistic, blend, continuum };

const char* region_name(Region r) noexcept;

/// Omega_a = [c - L_a, c + L_a], blend shells of width L_b on either side,
/// Omega_c the rest of the period. All lengths in lattice units.
class DomainDecomposition {
public:
    /// Requires L_a >= r_cut, L_b >= 2 and a nonempty continuum region.
    DomainDecomposition(const LatticeSystem& sys, long atomistic_half_width, long blend_width, long center = 0);

    /// Degenerate fixtures: everything atomistic, or everything continuum
    /// (Omega_a shrinks to the single point c).
    static DomainDecomposition all_atomistic(const LatticeSystem& sys, long center = 0);
    static DomainDecomposition all_continuum(const LatticeSystem& sys, long center = 0);

    long half_count() const noexcept { return half_count_; }
    long atomistic_half_width() const noexcept { return la_; }
    long blend_width() const noexcept { return lb_; }
    long center() const noexcept { return center_; }
    /// Length of Omega_c.
    long continuum_length() const noexcept { return 2 * half_count_ - 2 * (la_ + lb_) > 0 ? 2 * half_count_ - 2 * (la_ + lb_) : 0; }

    /// Periodic distance |x - c| reduced to [0, N].
    double distance(double x) const noexcept;
    /// a if distance <= L_a, b if distance < L_a + L_b, c otherwise.
    Region region(double x) const noexcept;
    /// Region of the open interval (x, x + h), judged at its midpoint.
    Region element_region(double left, double h) const noexcept { return region(left + 0.5 * h); }

    std::vector<Site> sites(Region r) const;

private:
    DomainDecomposition(long n, long la, long lb, long center, bool) noexcept
        : half_count_(n), la_(la), lb_(lb), center_(center) {}

    long half_count_;
    long la_;
    long lb_;
    long center_;
};

}  // namespace hocqc
