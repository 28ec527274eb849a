#include "hocqc/atomistic.hpp"

namespace hocqc {

namespace {

void check_size(const LatticeSystem& sys, std::size_t n) {
    if (n != static_cast<std::size_t>(sys.site_count())) {
        throw ConfigError("lattice vector has " + std::to_string(n) + " entries, expected 2N");
    }
}

}  // namespace

double energy_atomistic(const LatticeSystem& sys, std::span<const double> u) {
    check_size(sys, u.size());
    const std::size_t n = u.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys.range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            e += sys.potential_shifted(rho, u[j] - u[i], 0);
        }
    }
    return e;
}

double energy_atomistic(const LatticeSystem& sys, const LatticeFunction& u) {
    return energy_atomistic(sys, std::span<const double>(u.values()));
}

std::vector<double> gradient_atomistic(const LatticeSystem& sys, std::span<const double> u) {
    check_size(sys, u.size());
    const std::size_t n = u.size();
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys.range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            const double d = sys.potential_shifted(rho, u[j] - u[i], 1);
            g[j] += d;
            g[i] -= d;
        }
    }
    return g;
}

std::vector<double> gradient_atomistic(const LatticeSystem& sys, const LatticeFunction& u) {
    return gradient_atomistic(sys, std::span<const double>(u.values()));
}

BandMatrix hessian_atomistic(const LatticeSystem& sys, std::span<const double> u) {
    check_size(sys, u.size());
    const std::size_t n = u.size();
    BandMatrix h(n, static_cast<std::size_t>(sys.cutoff()));
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys.range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            const double k = sys.potential_shifted(rho, u[j] - u[i], 2);
            h.add(i, i, k);
            h.add(j, j, k);
            h.add(i, j, -k);
            h.add(j, i, -k);
        }
    }
    return h;
}

BandMatrix hessian_atomistic(const LatticeSystem& sys, const LatticeFunction& u) {
    return hessian_atomistic(sys, std::span<const double>(u.values()));
}

BandMatrix nearest_neighbor_laplacian(std::size_t n) {
    BandMatrix l(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        l.add(i, i, 1.0);
        l.add(j, j, 1.0);
        l.add(i, j, -1.0);
        l.add(j, i, -1.0);
    }
    return l;
}

std::pair<LatticeFunction, SolveReport> solve_atomistic(const LatticeSystem& sys, std::span<const double> load,
                                                       const NewtonConfig& cfg) {
    check_size(sys, load.size());
    std::vector<double> f(load.begin(), load.end());
    const std::size_t pin = sys.index(0);
    Objective obj;
    obj.value = [&](std::span<const double> u) {
        double e = energy_atomistic(sys, u);
        for (std::size_t i = 0; i < u.size(); ++i) e -= f[i] * u[i];
        return e;
    };
    obj.gradient = [&](std::span<const double> u) {
        auto g = gradient_atomistic(sys, u);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= f[i];
        return g;
    };
    obj.hessian = [&](std::span<const double> u) { return hessian_atomistic(sys, u); };

    SolveReport report;
    const std::size_t fixed[] = {pin};
    auto x = newton_minimize(obj, std::vector<double>(f.size(), 0.0), fixed, cfg, report);
    x[pin] = 0.0;
    return {LatticeFunction(sys, std::move(x)), report};
}

std::pair<LatticeFunction, SolveReport> solve_atomistic(const LatticeSystem& sys, const ExternalLoad& load,
                                                       const NewtonConfig& cfg) {
    const auto f = sample_load(load, sys);
    return solve_atomistic(sys, std::span<const double>(f), cfg);
}

double stability_margin(const LatticeSystem& sys, const LatticeFunction& u) {
    const std::size_t pin = sys.index(0);
    const BandMatrix h = without_index(hessian_atomistic(sys, u), pin);
    const BandMatrix l = without_index(nearest_neighbor_laplacian(u.size()), pin);
    return smallest_generalized_eigenvalue(h, l);
}

}  // namespace hocqc
