// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hocqc/atomistic.hpp"
#include "hocqc/harness.hpp"

using namespace hocqc;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

double slope_of(const StudyResult& r, Method m) {
    const auto it = r.slopes.find(m);
    return it == r.slopes.end() ? std::nan("") : it->second.slope;
}

std::string slopes_text(const StudyResult& r, const std::vector<Method>& ms) {
    std::string s;
    for (Method m : ms) {
        if (!s.empty()) s += ", ";
        s += fmt("%s %.3f", method_name(m), slope_of(r, m));
        if (r.failures.count(m)) s += " (partial: " + r.failures.at(m) + ")";
    }
    return s;
}

ExperimentConfig ladder(std::vector<Method> methods, LoadKind load) {
    ExperimentConfig cfg;
    cfg.methods = std::move(methods);
    cfg.half_counts = {50, 100, 200, 400, 800};
    cfg.potential = "harmonic";
    cfg.range = {1, 2};
    cfg.f_scale = 20.0;
    cfg.load = load;
    cfg.decomposition_fraction = 0.125;
    return cfg;
}

void criterion1() {
    const auto t0 = Clock::now();
    const std::vector<Method> ms{Method::bqce, Method::bqcf, Method::bqhoce, Method::bqhocf};
    const StudyResult r = run_convergence_study(ladder(ms, LoadKind::singular));
    const double t = seconds(t0);
    const double target[] = {2, 2, 2, 4};
    bool ok = !r.partial() && t < 120.0;
    for (std::size_t i = 0; i < ms.size(); ++i) ok = ok && within(slope_of(r, ms[i]), target[i], 0.4);
    report(1, ok, "slopes " + slopes_text(r, ms) + fmt("; targets 2,2,2,4 +-0.4; %.1fs (limit 120s)", t));
}

void criterion2() {
    const std::vector<Method> ms{Method::cb, Method::hoc};
    const StudyResult r = run_convergence_study(ladder(ms, LoadKind::singular));
    const bool ok = !r.partial() && slope_of(r, Method::cb) <= 0.5 && slope_of(r, Method::hoc) <= 0.5;
    report(2, ok, "singular load slopes " + slopes_text(r, ms) + "; limit <= 0.5");
}

void criterion3() {
    const std::vector<Method> ms{Method::hoc, Method::cb};
    const StudyResult r = run_convergence_study(ladder(ms, LoadKind::smooth));
    const bool ok = !r.partial() && within(slope_of(r, Method::hoc), 4.0, 0.4) && within(slope_of(r, Method::cb), 2.0, 0.4);
    report(3, ok, "smooth load slopes " + slopes_text(r, ms) + "; targets hoc 4, cb 2 +-0.4");
}

void criterion4() {
    const auto t0 = Clock::now();
    ExperimentConfig cfg;
    cfg.methods = {Method::bqhoce};
    cfg.half_counts = {10000};
    cfg.la = 100;
    cfg.lb = 100;
    cfg.region = ErrorRegion::continuum;
    cfg.h_list = {2000, 1000, 500, 250};
    const StudyResult r = run_coarsening_study(cfg);
    const double t = seconds(t0);
    std::string errs;
    for (const auto& rec : r.records) errs += fmt(" h=%g:%.3e", rec.resolution, rec.rel_error);
    const double s = slope_of(r, Method::bqhoce);
    report(4, !r.partial() && within(s, 5.0, 0.5) && t < 300.0,
           fmt("slope %.3f (target 5 +-0.5); rel errors", s) + errs + fmt("; %.1fs (limit 300s)", t));
}

void criterion5() {
    double worst = 0.0;
    for (const std::string pot : {"harmonic", "lj"}) {
        for (const std::vector<int>& range : {std::vector<int>{1}, {1, 2}, {1, 2, 3}}) {
            const LatticeSystem sys(64, 1.0, range, make_potential(pot));
            const DomainDecomposition dd(sys, 8, 8);
            for (Method m : {Method::bqcf, Method::bqhocf}) worst = std::max(worst, ghost_force_diagnostic(m, sys, dd).l2);
        }
    }
    report(5, worst <= 1e-12, fmt("largest force-method residual at u = 0: %.3e (limit 1e-12)", worst));
}

void criterion6() {
    const LatticeSystem sys(512, 1.0, {1, 2}, PairPotential::harmonic());
    std::vector<double> widths, duals;
    std::string text;
    for (long lb : {8, 16, 32, 64}) {
        const GhostForce g = ghost_force_diagnostic(Method::bqce, sys, DomainDecomposition(sys, 32, lb));
        widths.push_back(static_cast<double>(lb));
        duals.push_back(g.dual);
        text += fmt(" lb=%ld:%.3e", lb, g.dual);
    }
    const double s = fit_slope(widths, duals).slope;
    report(6, within(s, -1.5, 0.5), fmt("B-QCE ghost-force dual norm slope %.3f (target -1.5 +-0.5);", s) + text);
}

std::vector<double> random_state(std::mt19937& rng, std::size_t n, double amp, std::size_t pin) {
    std::uniform_real_distribution<double> d(-amp, amp);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    v[pin] = 0.0;
    return v;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void criterion7() {
    const LatticeSystem sys(24, 1.0, {1, 2}, PairPotential::lennard_jones());
    const DomainDecomposition dd(sys, 3, 6);
    const std::size_t pin = sys.index(0);
    const LatticeCoupling qce0(sys, BlendFunction(dd, BlendProfile::zero));
    const LatticeCoupling qce1(sys, BlendFunction(dd, BlendProfile::one));
    auto mixed = std::make_shared<const MixedFESpace>(build_canonical_mesh(sys, dd));
    auto quintic = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::quintic));
    auto affine = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::affine));
    const MixedCoupling hoc0(sys, BlendFunction(dd, BlendProfile::zero), mixed);
    const MixedCoupling hoc1(sys, BlendFunction(dd, BlendProfile::one), quintic);
    const ContinuumForm cb{&sys, ContinuumModel::cb, {}, false, {}};
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_state(rng, 48, 0.05, pin);
        const double ea = energy_atomistic(sys, u);
        worst = std::max(worst, rel_diff(qce0.energy_bqce(u), ea));
        // P1 CB energy: the affine space shares node order with storage order shifted to the mesh start.
        std::vector<double> c(affine->dof_count());
        for (std::size_t k = 0; k < affine->mesh().node_count(); ++k) {
            c[affine->node_dof(k)] = u[sys.index(affine->mesh().node(k))];
        }
        const double ecb = continuum_energy(cb, MixedFEFunction(affine, c), QuadratureRule());
        worst = std::max(worst, rel_diff(qce1.energy_bqce(u), ecb));

        const auto x = random_state(rng, mixed->dof_count(), 0.005, mixed->pinned_dof());
        const MixedFEFunction fx(mixed, x);
        const auto nodal = LatticeFunction::from_sites(sys, [&](Site xi) { return fx(static_cast<double>(xi)); });
        worst = std::max(worst, rel_diff(hoc0.energy_bqhoce(x), energy_atomistic(sys, nodal)));
        const auto y = random_state(rng, quintic->dof_count(), 0.005, quintic->pinned_dof());
        worst = std::max(worst, rel_diff(hoc1.energy_bqhoce(y), energy_hoc(sys, MixedFEFunction(quintic, y))));
    }
    report(7, worst <= 1e-12, fmt("largest relative reduction mismatch over 20 states x 4 identities: %.3e (limit 1e-12)", worst));
}

// max_i |fd_i - g_i| / max|g|, fd the central difference of f.
double gradient_check(const std::function<double(std::span<const double>)>& f, std::span<const double> x,
                      std::span<const double> g, std::size_t pin) {
    const double h = 1e-6;
    std::vector<double> y(x.begin(), x.end());
    double num = 0.0, den = 1e-12;
    for (std::size_t i = 0; i < y.size(); ++i) den = std::max(den, std::abs(g[i]));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i == pin) continue;
        const double x0 = y[i];
        y[i] = x0 + h;
        const double fp = f(y);
        y[i] = x0 - h;
        const double fm = f(y);
        y[i] = x0;
        num = std::max(num, std::abs((fp - fm) / (2 * h) - g[i]));
    }
    return num / den;
}

// Column-wise central differences of r against J, relative to max|J|.
double jacobian_check(const std::function<std::vector<double>(std::span<const double>)>& r, std::span<const double> x,
                      const BandMatrix& j, std::size_t pin) {
    const double h = 1e-6;
    const std::size_t n = x.size();
    std::vector<double> y(x.begin(), x.end());
    double num = 0.0, den = 1e-12;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) den = std::max(den, std::abs(j(a, b)));
    }
    for (std::size_t b = 0; b < n; ++b) {
        if (b == pin) continue;
        const double x0 = y[b];
        y[b] = x0 + h;
        const auto rp = r(y);
        y[b] = x0 - h;
        const auto rm = r(y);
        y[b] = x0;
        for (std::size_t a = 0; a < n; ++a) {
            if (a == pin) continue;
            num = std::max(num, std::abs((rp[a] - rm[a]) / (2 * h) - j(a, b)));
        }
    }
    return num / den;
}

void criterion8() {
    const LatticeSystem sys(16, 1.0, {1, 2}, PairPotential::lennard_jones());
    const DomainDecomposition dd(sys, 3, 5);
    const std::size_t pin = sys.index(0);
    const LatticeCoupling lat(sys, build_blend(dd));
    auto mixed = std::make_shared<const MixedFESpace>(build_canonical_mesh(sys, dd));
    auto quintic = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::quintic));
    auto affine = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::affine));
    const MixedCoupling mc(sys, build_blend(dd), mixed);
    const ContinuumForm cb{&sys, ContinuumModel::cb, {}, false, {}};
    const QuadratureRule rule;
    auto cb_hessian = [&](const MixedFEFunction& u) {
        std::vector<Triplet> t;
        continuum_jacobian(cb, u, rule, t);
        return BandMatrix::from_triplets(affine->dof_count(), t);
    };

    struct Worst {
        std::string name;
        double value = 0.0;
    };
    std::vector<Worst> rows;
    auto record = [&](const std::string& name, double v) {
        for (auto& r : rows) {
            if (r.name == name) {
                r.value = std::max(r.value, v);
                return;
            }
        }
        rows.push_back({name, v});
    };

    std::mt19937 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const auto u = random_state(rng, 32, 0.05, pin);
        record("atomistic gradient", gradient_check([&](auto x) { return energy_atomistic(sys, x); }, u,
                                                    gradient_atomistic(sys, u), pin));
        record("atomistic hessian", jacobian_check([&](auto x) { return gradient_atomistic(sys, x); }, u,
                                                   hessian_atomistic(sys, u), pin));
        record("bqce gradient", gradient_check([&](auto x) { return lat.energy_bqce(x); }, u, lat.gradient_bqce(u), pin));
        record("bqce hessian", jacobian_check([&](auto x) { return lat.gradient_bqce(x); }, u, lat.hessian_bqce(u), pin));
        record("bqcf jacobian", jacobian_check([&](auto x) { return lat.residual_bqcf(x); }, u, lat.jacobian_bqcf(u), pin));

        const auto a = random_state(rng, affine->dof_count(), 0.05, affine->pinned_dof());
        auto cbf = [&](std::span<const double> x) { return MixedFEFunction(affine, {x.begin(), x.end()}); };
        record("cb gradient", gradient_check([&](auto x) { return continuum_energy(cb, cbf(x), rule); }, a,
                                             continuum_gradient(cb, cbf(a), rule), affine->pinned_dof()));
        record("cb hessian", jacobian_check([&](auto x) { return continuum_gradient(cb, cbf(x), rule); }, a,
                                            cb_hessian(cbf(a)), affine->pinned_dof()));

        const auto q = random_state(rng, quintic->dof_count(), 0.005, quintic->pinned_dof());
        auto qf = [&](std::span<const double> x) { return MixedFEFunction(quintic, {x.begin(), x.end()}); };
        record("hoc gradient", gradient_check([&](auto x) { return energy_hoc(sys, qf(x)); }, q,
                                              variation_hoc(sys, qf(q)), quintic->pinned_dof()));
        record("hoc hessian", jacobian_check([&](auto x) { return variation_hoc(sys, qf(x)); }, q,
                                             hessian_hoc(sys, qf(q)), quintic->pinned_dof()));

        const auto m = random_state(rng, mixed->dof_count(), 0.005, mixed->pinned_dof());
        const std::size_t mp = mixed->pinned_dof();
        record("bqhoce gradient", gradient_check([&](auto x) { return mc.energy_bqhoce(x); }, m, mc.gradient_bqhoce(m), mp));
        record("bqhoce hessian", jacobian_check([&](auto x) { return mc.gradient_bqhoce(x); }, m, mc.hessian_bqhoce(m), mp));
        record("bqhocf jacobian", jacobian_check([&](auto x) { return mc.residual_bqhocf(x); }, m, mc.jacobian_bqhocf(m), mp));
    }
    double worst = 0.0;
    std::string text;
    for (const auto& r : rows) {
        worst = std::max(worst, r.value);
        text += fmt(" %s %.1e;", r.name.c_str(), r.value);
    }
    report(8, worst <= 1e-5, fmt("%zu operators x 20 states, worst relative mismatch %.3e (limit 1e-5):", rows.size(), worst) + text);
}

// L2 strain error on each unit element [xi, xi + 1], xi = -N+1..N.
std::vector<double> element_errors(const LatticeSystem& sys, const DomainDecomposition& dd, const LatticeFunction& u_ref,
                                   const CoupledSolution& sol) {
    const MixedFEFunction ref = reference_field(sys, dd, u_ref, sol);
    const MixedFEFunction um = sol.as_field(sys);
    const QuadratureRule rule;
    std::vector<double> out;
    for (Site xi = sys.first_site(); xi <= sys.last_site(); ++xi) {
        double s = 0.0;
        for (int q = 0; q < rule.order(); ++q) {
            const double x = static_cast<double>(xi) + rule.points()[static_cast<std::size_t>(q)];
            const double d = ref(sys.wrap(x), 1) - um(sys.wrap(x), 1);
            s += rule.weights()[static_cast<std::size_t>(q)] * d * d;
        }
        out.push_back(std::sqrt(s));
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void criterion9() {
    const LatticeSystem sys(300, 1.0, {1, 2}, PairPotential::harmonic());
    const long l = std::lround(0.125 * 600);
    const DomainDecomposition dd(sys, l, l);
    const auto load = ExternalLoad::singular(20.0);
    const LatticeFunction u = solve_atomistic(sys, load).first;
    const auto eq = element_errors(sys, dd, u, solve_coupled(Method::bqce, sys, dd, load));
    const auto eh = element_errors(sys, dd, u, solve_coupled(Method::bqhoce, sys, dd, load));
    // Interiors: elements at least 2 r_cut away from the region boundaries.
    const double margin = 2.0 * sys.cutoff();
    std::vector<double> qa, ha, qc, hc;
    Region max_q = Region::atomistic, max_h = Region::atomistic;
    double mq = -1.0, mh = -1.0;
    for (std::size_t k = 0; k < eq.size(); ++k) {
        const double mid = static_cast<double>(sys.site(k)) + 0.5;
        const double dist = dd.distance(mid);
        if (dist <= static_cast<double>(l) - margin) {
            qa.push_back(eq[k]);
            ha.push_back(eh[k]);
        } else if (dist >= static_cast<double>(2 * l) + margin) {
            qc.push_back(eq[k]);
            hc.push_back(eh[k]);
        }
        if (eq[k] > mq) {
            mq = eq[k];
            max_q = dd.region(mid);
        }
        if (eh[k] > mh) {
            mh = eh[k];
            max_h = dd.region(mid);
        }
    }
    const double a_q = median(qa), a_h = median(ha), c_q = median(qc), c_h = median(hc);
    const bool ok = a_h < a_q && c_h < c_q && max_q == Region::blend && max_h == Region::blend;
    report(9, ok, fmt("median element error Omega_a interior bqhoce %.3e vs bqce %.3e; Omega_c interior %.3e vs %.3e; "
                      "max error in %s (bqce), %s (bqhoce)",
                      a_h, a_q, c_h, c_q, region_name(max_q), region_name(max_h)));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9};
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
