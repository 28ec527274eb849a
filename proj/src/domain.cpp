#include "hocqc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hocqc {

const char* region_name(Region r) noexcept {
    switch (r) {
        case Region::atomistic: return "atomistic";
        case Region::blend: return "blend";
        default: return "continuum";
    }
}

DomainDecomposition::DomainDecomposition(const LatticeSystem& sys, long la, long lb, long center)
    : half_count_(sys.half_count()), la_(la), lb_(lb), center_(center) {
    if (la_ < sys.cutoff()) {
        throw ConfigError("atomistic half-width " + std::to_string(la_) + " below the cutoff " +
                          std::to_string(sys.cutoff()));
    }
    if (lb_ < 2) throw ConfigError("blend width must be at least 2");
    if (la_ + lb_ >= half_count_) throw ConfigError("decomposition leaves no continuum region");
}

DomainDecomposition DomainDecomposition::all_atomistic(const LatticeSystem& sys, long center) {
    return DomainDecomposition(sys.half_count(), sys.half_count(), 0, center, true);
}

DomainDecomposition DomainDecomposition::all_continuum(const LatticeSystem& sys, long center) {
    return DomainDecomposition(sys.half_count(), 0, 0, center, true);
}

double DomainDecomposition::distance(double x) const noexcept {
    const double period = 2.0 * static_cast<double>(half_count_);
    double d = std::fmod(x - static_cast<double>(center_), period);
    if (d < 0.0) d += period;
    return std::min(d, period - d);
}

Region DomainDecomposition::region(double x) const noexcept {
    const double d = distance(x);
    if (d <= static_cast<double>(la_)) return Region::atomistic;
    if (d < static_cast<double>(la_ + lb_)) return Region::blend;
    return Region::continuum;
}

std::vector<Site> DomainDecomposition::sites(Region r) const {
    std::vector<Site> out;
    for (Site xi = -half_count_ + 1; xi <= half_count_; ++xi) {
        if (region(static_cast<double>(xi)) == r) out.push_back(xi);
    }
    return out;
}

}  // namespace hocqc
