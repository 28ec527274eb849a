#include "hocqc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace hocqc {

// ---------------------------------------------------------------------------
// PairPotential

PairPotential::PairPotential(PotentialKind kind, std::string name, Evaluator eval)
    : kind_(kind), name_(std::move(name)), eval_(std::move(eval)) {}

PairPotential PairPotential::harmonic() {
    return PairPotential(PotentialKind::harmonic, "harmonic", [](double r, int order) {
        switch (order) {
            case 0: return 0.5 * (r - 1.0) * (r - 1.0);
            case 1: return r - 1.0;
            case 2: return 1.0;
            default: return 0.0;
        }
    });
}

PairPotential PairPotential::lennard_jones() {
    return PairPotential(PotentialKind::lennard_jones, "lj", [](double r, int order) {
        if (!(r > 0.0)) {
            throw DomainError("lennard-jones potential evaluated at r = " + std::to_string(r));
        }
        const double i6 = std::pow(r, -6);
        const double i12 = i6 * i6;
        switch (order) {
            case 0: return i12 - 2.0 * i6;
            case 1: return (-12.0 * i12 + 12.0 * i6) / r;
            case 2: return (156.0 * i12 - 84.0 * i6) / (r * r);
            default: return (-2184.0 * i12 + 672.0 * i6) / (r * r * r);
        }
    });
}

PairPotential PairPotential::user(std::string name, Evaluator eval) {
    return PairPotential(PotentialKind::user, std::move(name), std::move(eval));
}

double PairPotential::operator()(double r, int order) const {
    if (order < 0 || order > 3) {
        throw RangeError("potential derivative order " + std::to_string(order) + " not in 0..3");
    }
    return eval_(r, order);
}

double PairPotential::derivative_mismatch(std::span<const double> probes, double step) const {
    double worst = 0.0;
    for (double r : probes) {
        for (int j = 1; j <= 3; ++j) {
            const double fd = ((*this)(r + step, j - 1) - (*this)(r - step, j - 1)) / (2.0 * step);
            const double exact = (*this)(r, j);
            const double denom = std::max(std::abs(exact), 1.0);
            worst = std::max(worst, std::abs(fd - exact) / denom);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// LatticeSystem

LatticeSystem::LatticeSystem(long half_count, double macro_strain, std::vector<int> range,
                             PairPotential potential)
    : half_count_(half_count),
      macro_strain_(macro_strain),
      range_(std::move(range)),
      potential_(std::move(potential)) {
    if (half_count_ < 1) throw ConfigError("half count N must be positive");
    if (!(macro_strain_ > 0.0)) throw ConfigError("macroscopic strain F must be positive");
    if (range_.empty()) throw ConfigError("interaction range must be nonempty");
    std::sort(range_.begin(), range_.end());
    if (std::adjacent_find(range_.begin(), range_.end()) != range_.end()) {
        throw ConfigError("interaction range entries must be distinct");
    }
    if (range_.front() <= 0) throw ConfigError("interaction range entries must be positive");
    if (2 * half_count_ <= 4 * range_.back()) {
        throw ConfigError("lattice too small: need 2N > 4 r_cut");
    }
}

std::size_t LatticeSystem::index(Site xi) const noexcept {
    const long n = site_count();
    long k = (xi - first_site()) % n;
    if (k < 0) k += n;
    return static_cast<std::size_t>(k);
}

Site LatticeSystem::wrap(Site xi) const noexcept { return site(index(xi)); }

double LatticeSystem::wrap(double x) const noexcept {
    const double period = static_cast<double>(site_count());
    const double n = static_cast<double>(half_count_);
    double y = std::fmod(x + n, period);
    if (y <= 0.0) y += period;
    return y - n;
}

bool LatticeSystem::in_range(int rho) const noexcept {
    return std::binary_search(range_.begin(), range_.end(), std::abs(rho));
}

double LatticeSystem::potential_shifted(int rho, double r, int order) const {
    return potential_(r + macro_strain_ * rho, order);
}

// ---------------------------------------------------------------------------
// LatticeFunction

LatticeFunction::LatticeFunction(long half_count, std::vector<double> values, bool pinned)
    : half_count_(half_count), values_(std::move(values)), pinned_(pinned) {
    if (values_.size() != static_cast<std::size_t>(2 * half_count_)) {
        throw ConfigError("lattice function needs exactly 2N values");
    }
    if (pinned_ && values_[index(0)] != 0.0) {
        throw ConfigError("lattice function must vanish at site 0");
    }
}

LatticeFunction::LatticeFunction(const LatticeSystem& sys)
    : LatticeFunction(sys.half_count(), std::vector<double>(sys.site_count(), 0.0), true) {}

LatticeFunction::LatticeFunction(const LatticeSystem& sys, std::vector<double> values)
    : LatticeFunction(sys.half_count(), std::move(values), true) {}

LatticeFunction LatticeFunction::unpinned(const LatticeSystem& sys, std::vector<double> values) {
    return LatticeFunction(sys.half_count(), std::move(values), false);
}

LatticeFunction LatticeFunction::from_sites(const LatticeSystem& sys,
                                            const std::function<double(Site)>& g) {
    std::vector<double> v(sys.site_count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(sys.site(i));
    const bool pin = v[sys.index(0)] == 0.0;
    return LatticeFunction(sys.half_count(), std::move(v), pin);
}

std::size_t LatticeFunction::index(Site xi) const noexcept {
    const long n = 2 * half_count_;
    long k = (xi + half_count_ - 1) % n;
    if (k < 0) k += n;
    return static_cast<std::size_t>(k);
}

double finite_difference(const LatticeSystem& sys, const LatticeFunction& u, Site xi, int rho) {
    if (!sys.in_range(rho)) {
        throw RangeError("bond offset " + std::to_string(rho) + " not in the interaction range");
    }
    return u(xi + rho) - u(xi);
}

double lattice_pairing(std::span<const double> f, const LatticeFunction& u) {
    if (f.size() != u.size()) throw ConfigError("lattice pairing: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * u.values()[i];
    return s;
}

// ---------------------------------------------------------------------------
// ExternalLoad

namespace {

double wrap_unit(double x) {
    double y = std::fmod(x + 0.5, 1.0);
    if (y <= 0.0) y += 1.0;
    return y - 0.5;
}

}  // namespace

ExternalLoad::ExternalLoad(LoadKind kind, double scale, Profile profile, Profile third)
    : kind_(kind), scale_(scale), profile_(std::move(profile)), third_(std::move(third)) {}

ExternalLoad ExternalLoad::singular(double f_scale) {
    auto p = [f_scale](double x) {
        if (x > 0.0) return f_scale * (0.5 - x) / x;
        if (x < 0.0) return -f_scale * (x + 0.5) / x;
        return 0.0;
    };
    // (1/2 - x)/x = 1/(2x) - 1 on both branches up to sign.
    auto d3 = [f_scale](double x) {
        if (x == 0.0) return 0.0;
        const double x4 = x * x * x * x;
        return x > 0.0 ? -3.0 * f_scale / x4 : 3.0 * f_scale / x4;
    };
    return ExternalLoad(LoadKind::singular, f_scale, p, d3);
}

ExternalLoad ExternalLoad::smooth(double f_scale, int mode) {
    const double k = 2.0 * std::numbers::pi * mode;
    return ExternalLoad(
        LoadKind::smooth, f_scale, [f_scale, k](double x) { return f_scale * std::sin(k * x); },
        [f_scale, k](double x) { return -f_scale * k * k * k * std::cos(k * x); });
}

ExternalLoad ExternalLoad::user(Profile profile, Profile third_derivative) {
    return ExternalLoad(LoadKind::user, 1.0, std::move(profile), std::move(third_derivative));
}

double ExternalLoad::profile(double x) const { return profile_(wrap_unit(x)); }

double ExternalLoad::profile_third_derivative(double x) const {
    if (third_) return third_(wrap_unit(x));
    // Fourth-order central difference for f'''.
    const double h = 1e-3;
    auto f = [this](double y) { return profile(y); };
    return (-f(x + 3 * h) + 8 * f(x + 2 * h) - 13 * f(x + h) + 13 * f(x - h) - 8 * f(x - 2 * h) +
            f(x - 3 * h)) /
           (8 * h * h * h);
}

double ExternalLoad::density(const LatticeSystem& sys, double x) const {
    const double eps = sys.spacing();
    return eps * profile(eps * x);
}

double ExternalLoad::density_third_derivative(const LatticeSystem& sys, double x) const {
    const double eps = sys.spacing();
    return eps * eps * eps * eps * profile_third_derivative(eps * x);
}

std::vector<double> sample_load(const ExternalLoad& load, const LatticeSystem& sys) {
    std::vector<double> f(sys.site_count());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Site xi = sys.site(i);
        f[i] = xi == 0 ? 0.0 : load.density(sys, static_cast<double>(xi));
    }
    return f;
}

}  // namespace hocqc
