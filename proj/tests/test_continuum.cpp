#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hocqc/atomistic.hpp"
#include "hocqc/continuum.hpp"

using namespace hocqc;

namespace {

LatticeSystem make(long n, std::vector<int> range, PairPotential pot = PairPotential::harmonic()) {
    return LatticeSystem(n, 1.0, std::move(range), std::move(pot));
}

std::shared_ptr<const MixedFESpace> quintic_space(const LatticeSystem& sys) {
    return std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::quintic));
}

MixedFEFunction random_function(std::shared_ptr<const MixedFESpace> sp, double amp, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-amp, amp);
    std::vector<double> c(sp->dof_count());
    for (double& x : c) x = d(rng);
    c[sp->pinned_dof()] = 0.0;
    return MixedFEFunction(sp, std::move(c));
}

// Composite Simpson per element, independent of the Gauss rule.
double simpson_energy(const LatticeSystem& sys, const MixedFEFunction& u, int sub = 200) {
    double total = 0.0;
    const Mesh1D& m = u.space().mesh();
    for (std::size_t e = 0; e < m.element_count(); ++e) {
        const double h = m.size(e);
        double s = 0.0;
        for (int k = 0; k <= sub; ++k) {
            const double t = static_cast<double>(k) / sub;
            const double w = (k == 0 || k == sub) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            s += w * density_hoc(sys, u.on_element(e, t, 1), u.on_element(e, t, 3), DensityOrder::value).value;
        }
        total += s * h / (3.0 * sub);
    }
    return total;
}

}  // namespace

TEST_CASE("density_cb examples") {
    const auto s1 = make(8, {1});
    CHECK(density_cb(s1, 0.0) == 0.0);
    CHECK(density_cb(s1, 0.3) == doctest::Approx(0.045));
    CHECK(density_cb(s1, 0.2, 1) == doctest::Approx(0.2));
    const auto s12 = make(8, {1, 2});
    CHECK(density_cb(s12, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("density_hoc examples and restriction identity") {
    const auto s1 = make(8, {1});
    CHECK(density_hoc(s1, 0.12, -2.88).value == doctest::Approx(0.0));
    CHECK(density_hoc(s1, 0.1, 0.24).value == doctest::Approx(0.00605).epsilon(1e-13));
    for (const auto& pot : {PairPotential::harmonic(), PairPotential::lennard_jones()}) {
        const auto sys = make(8, {1, 2, 3}, pot);
        for (double g : {-0.05, 0.0, 0.02, 0.1}) {
            const auto d = density_hoc(sys, g, 0.0);
            CHECK(d.value == density_cb(sys, g, 0));
            CHECK(d.d1 == doctest::Approx(density_cb(sys, g, 1)).epsilon(1e-14));
            CHECK(d.d11 == doctest::Approx(density_cb(sys, g, 2)).epsilon(1e-14));
        }
        // Partials against central differences.
        const double g1 = 0.03, g3 = -0.2, h = 1e-6;
        const auto d = density_hoc(sys, g1, g3);
        auto val = [&](double a, double b) { return density_hoc(sys, a, b, DensityOrder::grad); };
        CHECK(std::abs((val(g1 + h, g3).value - val(g1 - h, g3).value) / (2 * h) - d.d1) <= 1e-6 * std::abs(d.d1) + 1e-9);
        CHECK(std::abs((val(g1, g3 + h).value - val(g1, g3 - h).value) / (2 * h) - d.d3) <= 1e-6 * std::abs(d.d3) + 1e-9);
        CHECK(std::abs((val(g1 + h, g3).d1 - val(g1 - h, g3).d1) / (2 * h) - d.d11) <= 1e-6 * std::abs(d.d11) + 1e-9);
        CHECK(std::abs((val(g1, g3 + h).d1 - val(g1, g3 - h).d1) / (2 * h) - d.d13) <= 1e-6 * std::abs(d.d13) + 1e-9);
        CHECK(std::abs((val(g1, g3 + h).d3 - val(g1, g3 - h).d3) / (2 * h) - d.d33) <= 1e-6 * std::abs(d.d33) + 1e-9);
    }
}

TEST_CASE("energy_hoc") {
    const auto sys = make(8, {1});
    auto sp = quintic_space(sys);
    CHECK(energy_hoc(sys, MixedFEFunction::zero(sp)) == 0.0);

    // Constant strain g on one element: contribution h W_hoc(g, 0).
    const double g = 0.07;
    std::vector<double> c(sp->dof_count(), 0.0);
    const std::size_t e = 3;
    const auto dofs = sp->element_dofs(e);
    const double vals[] = {0.0, g, 0.0, g, g, 0.0};
    for (int k = 0; k < 6; ++k) c[dofs[static_cast<std::size_t>(k)]] = vals[k];
    const MixedFEFunction u(sp, c);
    ContinuumForm form{&sys, ContinuumModel::hoc, {}, false, [e](std::size_t k) { return k == e; }};
    CHECK(continuum_energy(form, u, QuadratureRule()) == doctest::Approx(density_hoc(sys, g, 0.0).value));

    for (const auto& pot : {PairPotential::harmonic(), PairPotential::lennard_jones()}) {
        const auto s = make(8, {1, 2}, pot);
        auto q = quintic_space(s);
        for (unsigned seed = 0; seed < 3; ++seed) {
            const auto w = random_function(q, 0.005, seed);
            const double a = energy_hoc(s, w), b = simpson_energy(s, w);
            CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
        }
    }
}

TEST_CASE("variation and Hessian of the HOC energy") {
    const auto s1 = make(8, {1});
    const auto v0 = variation_hoc(s1, MixedFEFunction::zero(quintic_space(s1)));
    for (double v : v0) CHECK(v == 0.0);

    for (const auto& pot : {PairPotential::harmonic(), PairPotential::lennard_jones()}) {
        const auto sys = make(8, {1, 2}, pot);
        auto sp = quintic_space(sys);
        for (unsigned seed = 10; seed < 13; ++seed) {
            auto u = random_function(sp, 0.02, seed);
            const auto g = variation_hoc(sys, u);
            const BandMatrix h = hessian_hoc(sys, u);
            CHECK(h.is_symmetric(1e-12));
            const double step = 1e-6;
            double gmax = 0.0;
            for (double x : g) gmax = std::max(gmax, std::abs(x));
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto up = u.coeffs(), um = u.coeffs();
                up[i] += step;
                um[i] -= step;
                const double fd = (energy_hoc(sys, MixedFEFunction(sp, up)) - energy_hoc(sys, MixedFEFunction(sp, um))) /
                                  (2 * step);
                CHECK(std::abs(fd - g[i]) <= 1e-6 * std::max(gmax, 1e-3));
            }
            std::vector<double> dir(g.size());
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> d(-1, 1);
            for (double& x : dir) x = d(rng);
            auto up = u.coeffs(), um = u.coeffs();
            for (std::size_t i = 0; i < dir.size(); ++i) {
                up[i] += step * dir[i];
                um[i] -= step * dir[i];
            }
            const auto gp = variation_hoc(sys, MixedFEFunction(sp, up));
            const auto gm = variation_hoc(sys, MixedFEFunction(sp, um));
            const auto hv = h.multiply(dir);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < dir.size(); ++i) {
                num = std::max(num, std::abs((gp[i] - gm[i]) / (2 * step) - hv[i]));
                den = std::max(den, std::abs(hv[i]));
            }
            CHECK(num <= 1e-5 * den);
        }
    }
}

TEST_CASE("harmonic energies are exactly quadratic") {
    const auto sys = make(8, {1, 2});
    auto sp = quintic_space(sys);
    const auto zero = MixedFEFunction::zero(sp);
    const double e0 = energy_hoc(sys, zero);
    CHECK(e0 == doctest::Approx(16 * 0.5));
    const auto g0 = variation_hoc(sys, zero);
    const BandMatrix h = hessian_hoc(sys, zero);
    const auto u = random_function(sp, 0.5, 4);
    const auto hu = h.multiply(u.coeffs());
    double quad = e0;
    for (std::size_t i = 0; i < hu.size(); ++i) quad += g0[i] * u.coeffs()[i] + 0.5 * u.coeffs()[i] * hu[i];
    CHECK(std::abs(energy_hoc(sys, u) - quad) <= 1e-12 * std::max(1.0, std::abs(quad)));
}

TEST_CASE("continuum solves") {
    const auto sys = make(16, {1, 2});
    const auto [z, rz] = solve_hoc(sys, ExternalLoad::zero());
    for (double c : z.coeffs()) CHECK(c == 0.0);
    const auto [zc, rzc] = solve_cb(sys, ExternalLoad::zero());
    for (double c : zc.coeffs()) CHECK(c == 0.0);

    const auto load = ExternalLoad::smooth(1.0, 2);
    const auto [u, rep] = solve_hoc(sys, load);
    CHECK(rep.iterations == 1);
    const auto [uc, repc] = solve_cb(sys, load);
    CHECK(repc.iterations == 1);

    // Nearest-neighbour harmonic CB with nodal loads is the atomistic system.
    const auto s1 = make(16, {1});
    const auto [cb, r1] = solve_cb(s1, load, {}, LoadMode::nodal);
    const auto [ua, r2] = solve_atomistic(s1, load);
    for (Site xi = s1.first_site(); xi <= s1.last_site(); ++xi) {
        CHECK(std::abs(cb(static_cast<double>(xi)) - ua(xi)) <= 1e-10);
    }
}

TEST_CASE("stress diagnostics") {
    const auto s1 = make(8, {1});
    auto sp = quintic_space(s1);
    CHECK(stress_hoc(s1, MixedFEFunction::zero(sp), 0.5) == 0.0);

    // Pure cubic on element [0, 1]: u''' = c, lower derivatives vanish at x = 0.5 only through the data below.
    const auto sys = make(8, {1, 2}, PairPotential::lennard_jones());
    auto q = quintic_space(sys);
    const double c = 0.06;
    std::vector<double> coef(q->dof_count(), 0.0);
    const std::size_t e = q->mesh().locate(0.5).first;
    const auto dofs = q->element_dofs(e);
    // u = c (x - 1/2)^3 / 6 on [0, 1]; at x = 1/2 only u''' is nonzero.
    auto cub = [c](double x, int k) {
        const double y = x - 0.5;
        return k == 0 ? c * y * y * y / 6 : (k == 1 ? c * y * y / 2 : c * y);
    };
    const double data[] = {cub(0, 0), cub(0, 1), cub(0, 2), cub(1, 0), cub(1, 1), cub(1, 2)};
    for (int k = 0; k < 6; ++k) coef[dofs[static_cast<std::size_t>(k)]] = data[k];
    const MixedFEFunction u(q, coef);
    double expect = 0.0;
    for (int r : sys.range()) {
        const double rho = r, a = rho * rho * rho * c / 24;
        expect += rho * rho * rho * rho / 24 * sys.potential_shifted(r, a, 2) * c + rho * sys.potential_shifted(r, a, 1);
    }
    CHECK(stress_hoc(sys, u, 0.5) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("weak stress matches dW/dg1 - (dW/dg3)'' by differences") {
    const auto sys = make(8, {1, 2}, PairPotential::lennard_jones());
    auto sp = quintic_space(sys);
    const auto u = random_function(sp, 0.01, 21);
    auto d3 = [&](double x) { return density_hoc(sys, u(x, 1), u(x, 3), DensityOrder::grad).d3; };
    for (double x : {0.3, 2.5, -3.6}) {
        const double h = 1e-3;
        const double second = (d3(x + h) - 2 * d3(x) + d3(x - h)) / (h * h);
        const double oracle = density_hoc(sys, u(x, 1), u(x, 3), DensityOrder::grad).d1 - second;
        CHECK(std::abs(stress_hoc_weak(sys, u, x) - oracle) <= 1e-4 * std::abs(oracle));
    }
}
