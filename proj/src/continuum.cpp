#include "hocqc/continuum.hpp"

#include <cmath>

namespace hocqc {

double density_cb(const LatticeSystem& sys, double g, int order) {
    if (order < 0 || order > 2) throw RangeError("density_cb order " + std::to_string(order) + " not in 0..2");
    double s = 0.0;
    for (int rho : sys.range()) s += std::pow(rho, order) * sys.potential_shifted(rho, rho * g, order);
    return s;
}

HocDensity density_hoc(const LatticeSystem& sys, double g1, double g3, DensityOrder which) {
    HocDensity w;
    for (int r : sys.range()) {
        const double rho = r;
        const double c = rho * rho * rho / 24.0;
        const double a = rho * g1 + c * g3;
        w.value += sys.potential_shifted(r, a, 0);
        if (which == DensityOrder::value) continue;
        const double p1 = sys.potential_shifted(r, a, 1);
        w.d1 += rho * p1;
        w.d3 += c * p1;
        if (which == DensityOrder::grad) continue;
        const double p2 = sys.potential_shifted(r, a, 2);
        w.d11 += rho * rho * p2;
        w.d13 += rho * c * p2;
        w.d33 += c * c * p2;
    }
    return w;
}

namespace {

struct PointData {
    std::array<double, 6> n0, n1, n2, n3;
    double g1 = 0.0;
    double g3 = 0.0;
    std::array<double, 4> w{1.0, 0.0, 0.0, 0.0};
    double jxw = 0.0;
};

// Visits every quadrature point of the accepted elements.
template <class Visit>
void for_each_point(const ContinuumForm& form, const MixedFEFunction& u, const QuadratureRule& rule,
                    bool need_low_orders, Visit&& visit) {
    const MixedFESpace& space = u.space();
    const Mesh1D& mesh = space.mesh();
    const auto& c = u.coeffs();
    PointData p;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (form.elements && !form.elements(e)) continue;
        const ElementKind kind = mesh.kind(e);
        const double h = mesh.size(e);
        const double x0 = mesh.left(e);
        const auto dofs = space.element_dofs(e);
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const double t = rule.points()[qi];
            const double x = x0 + h * t;
            p.w = form.weight ? form.weight(x) : std::array<double, 4>{1.0, 0.0, 0.0, 0.0};
            if (p.w[0] == 0.0 && (!form.test_weight || (p.w[1] == 0.0 && p.w[2] == 0.0 && p.w[3] == 0.0))) continue;
            p.jxw = rule.weights()[qi] * h;
            p.n1 = element_basis(kind, h, t, 1);
            p.n3 = element_basis(kind, h, t, 3);
            if (need_low_orders) {
                p.n0 = element_basis(kind, h, t, 0);
                p.n2 = element_basis(kind, h, t, 2);
            }
            p.g1 = 0.0;
            p.g3 = 0.0;
            for (std::size_t k = 0; k < dofs.size(); ++k) {
                p.g1 += p.n1[k] * c[dofs[k]];
                p.g3 += p.n3[k] * c[dofs[k]];
            }
            visit(dofs, p);
        }
    }
}

HocDensity evaluate(const ContinuumForm& form, const PointData& p, DensityOrder which) {
    if (form.model == ContinuumModel::hoc) return density_hoc(*form.sys, p.g1, p.g3, which);
    HocDensity w = density_hoc(*form.sys, p.g1, 0.0, which);
    w.d3 = w.d13 = w.d33 = 0.0;
    return w;
}

// Test-function factors (a_k, b_k) multiplying dW/dg1 and dW/dg3 for local DOF k.
std::pair<double, double> test_factors(const ContinuumForm& form, const PointData& p, std::size_t k) {
    const auto& w = p.w;
    if (!form.test_weight) return {w[0] * p.n1[k], w[0] * p.n3[k]};
    const double a = w[1] * p.n0[k] + w[0] * p.n1[k];
    const double b = w[3] * p.n0[k] + 3.0 * w[2] * p.n1[k] + 3.0 * w[1] * p.n2[k] + w[0] * p.n3[k];
    return {a, b};
}

void check_form(const ContinuumForm& form) {
    if (form.sys == nullptr) throw ConfigError("continuum form without a lattice system");
}

}  // namespace

double continuum_energy(const ContinuumForm& form, const MixedFEFunction& u, const QuadratureRule& rule) {
    check_form(form);
    double s = 0.0;
    for_each_point(form, u, rule, false, [&](std::span<const std::size_t>, const PointData& p) {
        s += p.jxw * p.w[0] * evaluate(form, p, DensityOrder::value).value;
    });
    return s;
}

std::vector<double> continuum_gradient(const ContinuumForm& form, const MixedFEFunction& u,
                                       const QuadratureRule& rule) {
    check_form(form);
    std::vector<double> g(u.space().dof_count(), 0.0);
    for_each_point(form, u, rule, form.test_weight, [&](std::span<const std::size_t> dofs, const PointData& p) {
        const HocDensity w = evaluate(form, p, DensityOrder::grad);
        for (std::size_t k = 0; k < dofs.size(); ++k) {
            const auto [a, b] = test_factors(form, p, k);
            g[dofs[k]] += p.jxw * (w.d1 * a + w.d3 * b);
        }
    });
    return g;
}

void continuum_jacobian(const ContinuumForm& form, const MixedFEFunction& u, const QuadratureRule& rule,
                        std::vector<Triplet>& out) {
    check_form(form);
    for_each_point(form, u, rule, form.test_weight, [&](std::span<const std::size_t> dofs, const PointData& p) {
        const HocDensity w = evaluate(form, p, DensityOrder::hess);
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            const auto [a, b] = test_factors(form, p, i);
            for (std::size_t j = 0; j < dofs.size(); ++j) {
                const double v = a * (w.d11 * p.n1[j] + w.d13 * p.n3[j]) + b * (w.d13 * p.n1[j] + w.d33 * p.n3[j]);
                out.push_back({dofs[i], dofs[j], p.jxw * v});
            }
        }
    });
}

std::vector<double> continuum_load(const MixedFESpace& space, const LatticeSystem& sys, const ExternalLoad& load,
                                   const QuadratureRule& rule, const WeightFn& weight, const ElementFilter& elements) {
    const Mesh1D& mesh = space.mesh();
    std::vector<double> f(space.dof_count(), 0.0);
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        if (elements && !elements(e)) continue;
        const double h = mesh.size(e);
        const double x0 = mesh.left(e);
        const auto dofs = space.element_dofs(e);
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const double t = rule.points()[qi];
            const double x = x0 + h * t;
            const double w = weight ? weight(x)[0] : 1.0;
            if (w == 0.0) continue;
            const double fx = load.density(sys, x) * w * rule.weights()[qi] * h;
            const auto n0 = element_basis(mesh.kind(e), h, t, 0);
            for (std::size_t k = 0; k < dofs.size(); ++k) f[dofs[k]] += fx * n0[k];
        }
    }
    return f;
}

double energy_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const QuadratureRule& rule) {
    ContinuumForm form{&sys, ContinuumModel::hoc, {}, false, {}};
    return continuum_energy(form, u, rule);
}

std::vector<double> variation_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const QuadratureRule& rule) {
    ContinuumForm form{&sys, ContinuumModel::hoc, {}, false, {}};
    return continuum_gradient(form, u, rule);
}

BandMatrix hessian_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const QuadratureRule& rule) {
    ContinuumForm form{&sys, ContinuumModel::hoc, {}, false, {}};
    std::vector<Triplet> trip;
    continuum_jacobian(form, u, rule, trip);
    return BandMatrix::from_triplets(u.space().dof_count(), trip);
}

namespace {

std::pair<MixedFEFunction, SolveReport> solve_continuum(const LatticeSystem& sys, const ExternalLoad& load,
                                                        const NewtonConfig& cfg, LoadMode mode, ContinuumModel model) {
    const ElementKind kind = model == ContinuumModel::hoc ? ElementKind::quintic : ElementKind::affine;
    auto space = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, kind));
    const QuadratureRule rule;
    const ContinuumForm form{&sys, model, {}, false, {}};

    std::vector<double> f;
    if (mode == LoadMode::quadrature) {
        f = continuum_load(*space, sys, load, rule);
    } else {
        f.assign(space->dof_count(), 0.0);
        const auto samples = sample_load(load, sys);
        for (std::size_t k = 0; k < space->mesh().node_count(); ++k) {
            f[space->node_dof(k)] = samples[sys.index(space->mesh().node(k))];
        }
    }

    auto wrap = [&](std::span<const double> x) { return MixedFEFunction(space, std::vector<double>(x.begin(), x.end())); };
    Objective obj;
    obj.value = [&](std::span<const double> x) {
        double e = continuum_energy(form, wrap(x), rule);
        for (std::size_t i = 0; i < x.size(); ++i) e -= f[i] * x[i];
        return e;
    };
    obj.gradient = [&](std::span<const double> x) {
        auto g = continuum_gradient(form, wrap(x), rule);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= f[i];
        return g;
    };
    obj.hessian = [&](std::span<const double> x) {
        std::vector<Triplet> trip;
        continuum_jacobian(form, wrap(x), rule, trip);
        return BandMatrix::from_triplets(x.size(), trip);
    };
    SolveReport report;
    const std::size_t fixed[] = {space->pinned_dof()};
    auto x = newton_minimize(obj, std::vector<double>(space->dof_count(), 0.0), fixed, cfg, report);
    return {MixedFEFunction(space, std::move(x)), report};
}

struct StressTerms {
    double first = 0.0;   // rho phi'
    double curv = 0.0;    // rho^3/24 phi''' (rho u'' + rho^3/24 u'''')^2
    double third = 0.0;   // rho^4/24 phi'' u'''
    double fifth = 0.0;   // rho^6/576 phi'' u^(5)
};

StressTerms stress_terms(const LatticeSystem& sys, const MixedFEFunction& u, double x) {
    const double u1 = u(x, 1);
    const double u2 = u(x, 2);
    const double u3 = u(x, 3);
    const double u4 = u(x, 4);
    const double u5 = u(x, 5);
    StressTerms s;
    for (int r : sys.range()) {
        const double rho = r;
        const double c = rho * rho * rho / 24.0;
        const double a = rho * u1 + c * u3;
        const double da = rho * u2 + c * u4;
        const double p2 = sys.potential_shifted(r, a, 2);
        s.first += rho * sys.potential_shifted(r, a, 1);
        s.curv += c * sys.potential_shifted(r, a, 3) * da * da;
        s.third += rho * c * p2 * u3;
        s.fifth += c * c * p2 * u5;
    }
    return s;
}

}  // namespace

std::pair<MixedFEFunction, SolveReport> solve_hoc(const LatticeSystem& sys, const ExternalLoad& load,
                                                 const NewtonConfig& cfg, LoadMode mode) {
    return solve_continuum(sys, load, cfg, mode, ContinuumModel::hoc);
}

std::pair<MixedFEFunction, SolveReport> solve_cb(const LatticeSystem& sys, const ExternalLoad& load,
                                                const NewtonConfig& cfg, LoadMode mode) {
    return solve_continuum(sys, load, cfg, mode, ContinuumModel::cb);
}

double stress_hoc(const LatticeSystem& sys, const MixedFEFunction& u, double x) {
    const StressTerms s = stress_terms(sys, u, x);
    return s.fifth + s.curv + s.third + s.first;
}

double stress_hoc_weak(const LatticeSystem& sys, const MixedFEFunction& u, double x) {
    const StressTerms s = stress_terms(sys, u, x);
    return s.first - s.curv - s.third - s.fifth;
}

}  // namespace hocqc
