#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hocqc/atomistic.hpp"
#include "hocqc/newton.hpp"

using namespace hocqc;

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

BandMatrix random_spd_cyclic(std::size_t n, std::size_t b, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    BandMatrix a(n, b);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 1; k <= b; ++k) {
            const std::size_t j = (i + k) % n;
            const double v = d(rng);
            a.add(i, j, v);
            a.add(j, i, v);
        }
    }
    for (std::size_t i = 0; i < n; ++i) a.add(i, i, 4.0 * static_cast<double>(b) + 1.0);
    return a;
}

}  // namespace

TEST_CASE("identity solve returns rhs") {
    BandMatrix id(6, 1);
    for (std::size_t i = 0; i < 6; ++i) id.set(i, i, 1.0);
    const std::vector<double> rhs{1, -2, 3, 0.5, 7, -1};
    LinearSolveInfo info;
    const auto x = banded_solve(id, rhs, &info);
    for (std::size_t i = 0; i < 6; ++i) CHECK(x[i] == rhs[i]);
    CHECK(info.path == FactorPath::cholesky);
}

TEST_CASE("tridiagonal Laplacian on 8 DOFs") {
    // -x_{i-1} + 2 x_i - x_{i+1} = 1 with zero ends: x_i = i (9 - i) / 2.
    BandMatrix a(8, 1);
    for (std::size_t i = 0; i < 8; ++i) {
        a.set(i, i, 2.0);
        if (i + 1 < 8) {
            a.set(i, i + 1, -1.0);
            a.set(i + 1, i, -1.0);
        }
    }
    const std::vector<double> rhs(8, 1.0);
    for (auto* solve : {+[](const BandMatrix& m, std::span<const double> r) { return banded_solve(m, r); },
                        +[](const BandMatrix& m, std::span<const double> r) { return lu_solve(m, r); },
                        +[](const BandMatrix& m, std::span<const double> r) { return *cholesky_solve(m, r); }}) {
        const auto x = solve(a, rhs);
        for (std::size_t i = 0; i < 8; ++i) {
            const double k = static_cast<double>(i + 1);
            CHECK(std::abs(x[i] - k * (9.0 - k) / 2.0) <= 1e-12);
        }
    }
}

TEST_CASE("cyclic SPD uses Cholesky with the bordered solve") {
    for (std::size_t n : {7u, 40u, 301u}) {
        const BandMatrix a = random_spd_cyclic(n, 3, static_cast<unsigned>(n));
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = std::sin(0.3 * static_cast<double>(i));
        LinearSolveInfo info;
        const auto x = banded_solve(a, rhs, &info);
        CHECK(info.path == FactorPath::cholesky);
        CHECK(info.bordered == (n >= 16));
        auto r = a.multiply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= rhs[i];
        CHECK(max_abs(r) <= 1e-12 * max_abs(rhs) * 10);
    }
}

TEST_CASE("nonsymmetric and indefinite matrices take the LU path") {
    BandMatrix a = random_spd_cyclic(50, 2, 3);
    a.add(0, 2, 0.3);
    std::vector<double> rhs(50, 1.0);
    LinearSolveInfo info;
    auto x = banded_solve(a, rhs, &info);
    CHECK(info.path == FactorPath::lu);
    auto r = a.multiply(x);
    for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(r[i] - 1.0) <= 1e-12);

    BandMatrix s = random_spd_cyclic(50, 2, 4);
    s.add(10, 10, -40.0);
    CHECK_FALSE(cholesky_solve(s, rhs).has_value());
    x = banded_solve(s, rhs, &info);
    CHECK(info.path == FactorPath::lu);
    r = s.multiply(x);
    for (std::size_t i = 0; i < 50; ++i) CHECK(std::abs(r[i] - 1.0) <= 1e-11);
}

TEST_CASE("singular matrix raises") {
    BandMatrix z(5, 1);
    CHECK_THROWS_AS(lu_solve(z, std::vector<double>(5, 1.0)), NumericalError);
}

TEST_CASE("band matrix bookkeeping") {
    const std::vector<Triplet> t{{0, 0, 1.0}, {0, 9, 2.0}, {9, 0, 2.0}, {0, 0, 0.5}};
    const BandMatrix a = BandMatrix::from_triplets(10, t);
    CHECK(a.half_bandwidth() == 1);
    CHECK(a(0, 0) == 1.5);
    CHECK(a(9, 0) == 2.0);
    CHECK(a.is_symmetric());
    BandMatrix p = a;
    p.pin(0);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(0, 9) == 0.0);
    BandMatrix s = a;
    s.scale_symmetric(std::vector<double>{2, 1, 1, 1, 1, 1, 1, 1, 1, 3});
    CHECK(s(0, 0) == 6.0);
    CHECK(s(0, 9) == 12.0);
}

TEST_CASE("newton_minimize on a quadratic takes one step") {
    // E = 1/2 x^T A x - b^T x.
    const BandMatrix a = random_spd_cyclic(20, 2, 11);
    std::vector<double> b(20);
    for (std::size_t i = 0; i < 20; ++i) b[i] = std::cos(static_cast<double>(i));
    Objective obj{[&](std::span<const double> x) {
                      const auto ax = a.multiply(x);
                      double e = 0.0;
                      for (std::size_t i = 0; i < x.size(); ++i) e += 0.5 * x[i] * ax[i] - b[i] * x[i];
                      return e;
                  },
                  [&](std::span<const double> x) {
                      auto g = a.multiply(x);
                      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= b[i];
                      return g;
                  },
                  [&](std::span<const double>) { return a; }};
    SolveReport rep;
    const auto x = newton_minimize(obj, std::vector<double>(20, 0.0), {}, NewtonConfig{}, rep);
    CHECK(rep.iterations == 1);
    CHECK(rep.converged);
    SolveReport rep2;
    const auto x2 = newton_minimize(obj, x, {}, NewtonConfig{}, rep2);
    CHECK(rep2.iterations == 0);
    CHECK(x2 == x);
}

TEST_CASE("newton_root on a linear residual takes one step") {
    BandMatrix a = random_spd_cyclic(15, 1, 5);
    a.add(3, 4, 0.7);
    const std::vector<double> b(15, 2.0);
    Residual res{[&](std::span<const double> x) {
                     auto r = a.multiply(x);
                     for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
                     return r;
                 },
                 [&](std::span<const double>) { return a; }};
    SolveReport rep;
    std::vector<double> x0(15, 0.0);
    x0[0] = 0.25;
    const std::size_t fixed[] = {0};
    const auto x = newton_root(res, x0, fixed, NewtonConfig{}, rep);
    CHECK(rep.iterations == 1);
    CHECK(x[0] == 0.25);
    const auto r = res.value(x);
    for (std::size_t i = 1; i < 15; ++i) CHECK(std::abs(r[i]) <= 1e-12);
}

TEST_CASE("lennard-jones chain: monotone energy, deterministic") {
    const LatticeSystem sys(32, 1.0, {1, 2}, PairPotential::lennard_jones());
    const auto load = ExternalLoad::smooth(0.2, 1);
    const NewtonConfig cfg;
    const auto [u, rep] = solve_atomistic(sys, load, cfg);
    CHECK(rep.converged);
    CHECK(rep.final_residual_norm <= 1e-9);
    // Strict decrease until the change reaches the roundoff of E.
    for (std::size_t k = 1; k < rep.merit.size(); ++k) {
        const double noise = 64.0 * 2.2e-16 * std::abs(rep.merit[k - 1]);
        CHECK(rep.merit[k] <= rep.merit[k - 1] + noise);
        if (rep.merit[k - 1] - rep.merit[k] > noise) CHECK(rep.merit[k] < rep.merit[k - 1]);
    }
    CHECK(rep.merit.back() < rep.merit.front());
    const auto [u2, rep2] = solve_atomistic(sys, load, cfg);
    CHECK(u2.values() == u.values());
    CHECK(rep2.iterations == rep.iterations);
}

TEST_CASE("non-convergence carries the best iterate") {
    const LatticeSystem sys(32, 1.0, {1, 2}, PairPotential::lennard_jones());
    NewtonConfig cfg;
    cfg.max_iter = 1;
    cfg.relative = false;
    try {
        solve_atomistic(sys, ExternalLoad::smooth(2.0, 1), cfg);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.best_iterate().size() == 64);
        CHECK(std::string(e.kind()) == "nonconvergence");
    }
}

TEST_CASE("config validation") {
    NewtonConfig c;
    c.tol = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.max_iter = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    CHECK(c.threshold(1e6) == doctest::Approx(1e-4));
    CHECK(c.threshold(0.1) == 1e-10);
    c.relative = false;
    CHECK(c.threshold(1e6) == 1e-10);
}
