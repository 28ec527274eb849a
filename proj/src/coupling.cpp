#include "hocqc/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "hocqc/atomistic.hpp"
#include "hocqc/spline.hpp"

namespace hocqc {

// ---------------------------------------------------------------------------
// Blend

BlendFunction::BlendFunction(const DomainDecomposition& dd, BlendProfile profile) : dd_(dd), profile_(profile) {}

BlendFunction build_blend(const DomainDecomposition& dd) { return BlendFunction(dd); }

std::array<double, 4> BlendFunction::operator()(double x) const noexcept {
    if (profile_ == BlendProfile::zero) return {0.0, 0.0, 0.0, 0.0};
    if (profile_ == BlendProfile::one) return {1.0, 0.0, 0.0, 0.0};
    const double period = 2.0 * static_cast<double>(dd_.half_count());
    double s = std::fmod(x - static_cast<double>(dd_.center()), period);
    if (s < 0.0) s += period;
    if (s > 0.5 * period) s -= period;
    const double d = std::abs(s);
    const double sign = s < 0.0 ? -1.0 : 1.0;
    const double la = static_cast<double>(dd_.atomistic_half_width());
    const double lb = static_cast<double>(dd_.blend_width());
    if (d <= la) return {0.0, 0.0, 0.0, 0.0};
    if (d >= la + lb) return {1.0, 0.0, 0.0, 0.0};
    const double t = (d - la) / lb;
    const double v = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    const double d1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    const double d2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    const double d3 = 60.0 - 360.0 * t + 360.0 * t * t;
    return {v, sign * d1 / lb, d2 / (lb * lb), sign * d3 / (lb * lb * lb)};
}

// ---------------------------------------------------------------------------
// B-QCE / B-QCF

LatticeCoupling::LatticeCoupling(const LatticeSystem& sys, BlendFunction blend, BondWeighting weighting)
    : sys_(&sys), blend_(std::move(blend)), weighting_(weighting) {
    if (blend_.decomposition().half_count() != sys.half_count()) {
        throw ConfigError("blend function belongs to a different system");
    }
    beta_.resize(static_cast<std::size_t>(sys.site_count()));
    for (std::size_t i = 0; i < beta_.size(); ++i) beta_[i] = blend_.value(static_cast<double>(sys.site(i)));
}

double LatticeCoupling::bond_weight(std::size_t i, std::size_t j) const noexcept {
    if (weighting_ == BondWeighting::left_site) return 1.0 - beta_[i];
    return 1.0 - 0.5 * (beta_[i] + beta_[j]);
}

double LatticeCoupling::energy_bqce(std::span<const double> u) const {
    const std::size_t n = beta_.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys_->range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            const double w = bond_weight(i, j);
            if (w != 0.0) e += w * sys_->potential_shifted(rho, u[j] - u[i], 0);
        }
        const std::size_t k = (i + 1) % n;
        const double qb = 0.5 * (beta_[i] + beta_[k]);
        if (qb != 0.0) e += qb * density_cb(*sys_, u[k] - u[i], 0);
    }
    return e;
}

std::vector<double> LatticeCoupling::gradient_bqce(std::span<const double> u) const {
    const std::size_t n = beta_.size();
    std::vector<double> g(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys_->range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            const double w = bond_weight(i, j);
            if (w == 0.0) continue;
            const double d = w * sys_->potential_shifted(rho, u[j] - u[i], 1);
            g[j] += d;
            g[i] -= d;
        }
        const std::size_t k = (i + 1) % n;
        const double qb = 0.5 * (beta_[i] + beta_[k]);
        if (qb == 0.0) continue;
        const double s = qb * density_cb(*sys_, u[k] - u[i], 1);
        g[k] += s;
        g[i] -= s;
    }
    return g;
}

BandMatrix LatticeCoupling::hessian_bqce(std::span<const double> u) const {
    const std::size_t n = beta_.size();
    BandMatrix h(n, static_cast<std::size_t>(sys_->cutoff()));
    auto couple = [&h](std::size_t i, std::size_t j, double k) {
        h.add(i, i, k);
        h.add(j, j, k);
        h.add(i, j, -k);
        h.add(j, i, -k);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys_->range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            const double w = bond_weight(i, j);
            if (w != 0.0) couple(i, j, w * sys_->potential_shifted(rho, u[j] - u[i], 2));
        }
        const std::size_t k = (i + 1) % n;
        const double qb = 0.5 * (beta_[i] + beta_[k]);
        if (qb != 0.0) couple(i, k, qb * density_cb(*sys_, u[k] - u[i], 2));
    }
    return h;
}

std::vector<double> LatticeCoupling::residual_bqcf(std::span<const double> u) const {
    const std::size_t n = beta_.size();
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys_->range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            if (beta_[i] == 1.0 && beta_[j] == 1.0) continue;
            const double d = sys_->potential_shifted(rho, u[j] - u[i], 1);
            r[j] += (1.0 - beta_[j]) * d;
            r[i] -= (1.0 - beta_[i]) * d;
        }
        const std::size_t k = (i + 1) % n;
        if (beta_[i] == 0.0 && beta_[k] == 0.0) continue;
        const double s = density_cb(*sys_, u[k] - u[i], 1);
        r[k] += beta_[k] * s;
        r[i] -= beta_[i] * s;
    }
    return r;
}

BandMatrix LatticeCoupling::jacobian_bqcf(std::span<const double> u) const {
    const std::size_t n = beta_.size();
    BandMatrix jac(n, static_cast<std::size_t>(sys_->cutoff()));
    // Row a gets ca * k * (e_j - e_i).
    auto couple = [&jac](std::size_t i, std::size_t j, double ci, double cj, double k) {
        jac.add(j, j, cj * k);
        jac.add(j, i, -cj * k);
        jac.add(i, j, -ci * k);
        jac.add(i, i, ci * k);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (int rho : sys_->range()) {
            const std::size_t j = (i + static_cast<std::size_t>(rho)) % n;
            if (beta_[i] == 1.0 && beta_[j] == 1.0) continue;
            couple(i, j, 1.0 - beta_[i], 1.0 - beta_[j], sys_->potential_shifted(rho, u[j] - u[i], 2));
        }
        const std::size_t k = (i + 1) % n;
        if (beta_[i] == 0.0 && beta_[k] == 0.0) continue;
        couple(i, k, beta_[i], beta_[k], density_cb(*sys_, u[k] - u[i], 2));
    }
    return jac;
}

// ---------------------------------------------------------------------------
// B-QHOCE / B-QHOCF

namespace {

PointFunctional compact(const PointFunctional& f) {
    PointFunctional out;
    for (int k = 0; k < f.count; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (f.weight[ku] == 0.0) continue;
        const auto o = static_cast<std::size_t>(out.count++);
        out.dof[o] = f.dof[ku];
        out.weight[o] = f.weight[ku];
    }
    return out;
}

double apply(const PointFunctional& f, std::span<const double> c) noexcept {
    double s = 0.0;
    for (int k = 0; k < f.count; ++k) s += f.weight[static_cast<std::size_t>(k)] * c[f.dof[static_cast<std::size_t>(k)]];
    return s;
}

void scatter(const PointFunctional& f, double scale, std::vector<double>& out) {
    for (int k = 0; k < f.count; ++k) out[f.dof[static_cast<std::size_t>(k)]] += scale * f.weight[static_cast<std::size_t>(k)];
}

// Sparse vector sum  alpha * f + gamma * g  as (dof, weight) pairs.
std::vector<std::pair<std::size_t, double>> combine(const PointFunctional& f, double alpha, const PointFunctional& g,
                                                    double gamma) {
    std::vector<std::pair<std::size_t, double>> v;
    for (int k = 0; k < f.count; ++k) v.emplace_back(f.dof[static_cast<std::size_t>(k)], alpha * f.weight[static_cast<std::size_t>(k)]);
    for (int k = 0; k < g.count; ++k) v.emplace_back(g.dof[static_cast<std::size_t>(k)], gamma * g.weight[static_cast<std::size_t>(k)]);
    return v;
}

void outer(const std::vector<std::pair<std::size_t, double>>& rows, const std::vector<std::pair<std::size_t, double>>& cols,
           double k, std::vector<Triplet>& out) {
    for (const auto& [i, a] : rows) {
        if (a == 0.0) continue;
        for (const auto& [j, b] : cols) {
            if (b != 0.0) out.push_back({i, j, k * a * b});
        }
    }
}

}  // namespace

MixedCoupling::MixedCoupling(const LatticeSystem& sys, BlendFunction blend, std::shared_ptr<const MixedFESpace> space,
                             BondWeighting weighting, int quadrature_order)
    : sys_(&sys), blend_(std::move(blend)), space_(std::move(space)), rule_(quadrature_order) {
    if (space_->mesh().half_count() != sys.half_count()) throw ConfigError("mixed space belongs to a different system");
    for (Site xi = sys.first_site(); xi <= sys.last_site(); ++xi) {
        sites_.emplace_back(xi, compact(space_->functional(static_cast<double>(xi))));
    }
    for (const auto& [xi, fa] : sites_) {
        const double ba = blend_.value(static_cast<double>(xi));
        for (int rho : sys.range()) {
            const double bb = blend_.value(static_cast<double>(xi + rho));
            const double we = weighting == BondWeighting::left_site ? 1.0 - ba : 1.0 - 0.5 * (ba + bb);
            if (we == 0.0 && ba == 1.0 && bb == 1.0) continue;
            bonds_.push_back({fa, compact(space_->functional(static_cast<double>(xi + rho))), rho, we, 1.0 - ba, 1.0 - bb});
        }
    }
}

double MixedCoupling::bond_difference(const Bond& bond, std::span<const double> c) const noexcept {
    return apply(bond.b, c) - apply(bond.a, c);
}

MixedFEFunction MixedCoupling::field(std::span<const double> c) const {
    return MixedFEFunction(space_, std::vector<double>(c.begin(), c.end()));
}

double MixedCoupling::energy_bqhoce(std::span<const double> c) const {
    double e = 0.0;
    for (const Bond& bond : bonds_) {
        if (bond.w_energy != 0.0) e += bond.w_energy * sys_->potential_shifted(bond.rho, bond_difference(bond, c), 0);
    }
    const ContinuumForm form{sys_, ContinuumModel::hoc, std::cref(blend_), false, {}};
    return e + continuum_energy(form, field(c), rule_);
}

std::vector<double> MixedCoupling::gradient_bqhoce(std::span<const double> c) const {
    const ContinuumForm form{sys_, ContinuumModel::hoc, std::cref(blend_), false, {}};
    std::vector<double> g = continuum_gradient(form, field(c), rule_);
    for (const Bond& bond : bonds_) {
        if (bond.w_energy == 0.0) continue;
        const double d = bond.w_energy * sys_->potential_shifted(bond.rho, bond_difference(bond, c), 1);
        scatter(bond.b, d, g);
        scatter(bond.a, -d, g);
    }
    return g;
}

BandMatrix MixedCoupling::hessian_bqhoce(std::span<const double> c) const {
    const ContinuumForm form{sys_, ContinuumModel::hoc, std::cref(blend_), false, {}};
    std::vector<Triplet> trip;
    continuum_jacobian(form, field(c), rule_, trip);
    for (const Bond& bond : bonds_) {
        if (bond.w_energy == 0.0) continue;
        const double k = bond.w_energy * sys_->potential_shifted(bond.rho, bond_difference(bond, c), 2);
        const auto diff = combine(bond.b, 1.0, bond.a, -1.0);
        outer(diff, diff, k, trip);
    }
    return BandMatrix::from_triplets(space_->dof_count(), trip);
}

std::vector<double> MixedCoupling::external_bqhoce(const ExternalLoad& load) const {
    const DomainDecomposition& dd = blend_.decomposition();
    const Mesh1D& mesh = space_->mesh();
    const bool has_outer = dd.atomistic_half_width() < dd.half_count();
    auto outside_a = [&](std::size_t e) { return dd.element_region(mesh.left(e), mesh.size(e)) != Region::atomistic; };
    std::vector<double> f = continuum_load(*space_, *sys_, load, rule_, {}, outside_a);
    for (const auto& [xi, fn] : sites_) {
        const double x = static_cast<double>(xi);
        if (dd.region(x) != Region::atomistic || xi == 0) continue;
        // Sites on the boundary of Omega_a share their cell with the continuum integral.
        const bool edge = has_outer && dd.distance(x) == static_cast<double>(dd.atomistic_half_width());
        scatter(fn, (edge ? 0.5 : 1.0) * load.density(*sys_, x), f);
    }
    return f;
}

std::vector<double> MixedCoupling::residual_bqhocf(std::span<const double> c) const {
    const ContinuumForm form{sys_, ContinuumModel::hoc, std::cref(blend_), true, {}};
    std::vector<double> r = continuum_gradient(form, field(c), rule_);
    for (const Bond& bond : bonds_) {
        if (bond.wa == 0.0 && bond.wb == 0.0) continue;
        const double d = sys_->potential_shifted(bond.rho, bond_difference(bond, c), 1);
        scatter(bond.b, bond.wb * d, r);
        scatter(bond.a, -bond.wa * d, r);
    }
    return r;
}

BandMatrix MixedCoupling::jacobian_bqhocf(std::span<const double> c) const {
    const ContinuumForm form{sys_, ContinuumModel::hoc, std::cref(blend_), true, {}};
    std::vector<Triplet> trip;
    continuum_jacobian(form, field(c), rule_, trip);
    for (const Bond& bond : bonds_) {
        if (bond.wa == 0.0 && bond.wb == 0.0) continue;
        const double k = sys_->potential_shifted(bond.rho, bond_difference(bond, c), 2);
        outer(combine(bond.b, bond.wb, bond.a, -bond.wa), combine(bond.b, 1.0, bond.a, -1.0), k, trip);
    }
    return BandMatrix::from_triplets(space_->dof_count(), trip);
}

std::vector<double> MixedCoupling::load_bqhocf(const ExternalLoad& load) const {
    std::vector<double> f = continuum_load(*space_, *sys_, load, rule_, std::cref(blend_));
    for (const auto& [xi, fn] : sites_) {
        const double x = static_cast<double>(xi);
        const double w = 1.0 - blend_.value(x);
        if (w == 0.0 || xi == 0) continue;
        scatter(fn, w * load.density(*sys_, x), f);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Methods and solves

const char* method_name(Method m) noexcept {
    switch (m) {
        case Method::atomistic: return "atomistic";
        case Method::cb: return "cb";
        case Method::hoc: return "hoc";
        case Method::bqce: return "bqce";
        case Method::bqcf: return "bqcf";
        case Method::bqhoce: return "bqhoce";
        default: return "bqhocf";
    }
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::atomistic, Method::cb, Method::hoc, Method::bqce, Method::bqcf, Method::bqhoce,
                     Method::bqhocf}) {
        if (name == method_name(m)) return m;
    }
    throw ConfigError("unknown method '" + name + "'");
}

bool method_uses_mixed_space(Method m) noexcept {
    return m == Method::cb || m == Method::hoc || m == Method::bqhoce || m == Method::bqhocf;
}

MixedFEFunction CoupledSolution::as_field(const LatticeSystem& sys) const {
    if (field) return *field;
    return interpolate_P1(sys, *lattice);
}

namespace {

std::shared_ptr<const MixedFESpace> coupled_space(const LatticeSystem& sys, const DomainDecomposition& dd,
                                                  const CouplingOptions& opt) {
    Mesh1D mesh = opt.target_h > 1.0 ? build_coarse_mesh(sys, dd, opt.target_h) : build_canonical_mesh(sys, dd);
    return std::make_shared<const MixedFESpace>(std::move(mesh));
}

template <class F>
std::vector<double> minus(F&& v, const std::vector<double>& f) {
    std::vector<double> g = v;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= f[i];
    return g;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

CoupledSolution solve_coupled(Method method, const LatticeSystem& sys, const DomainDecomposition& dd,
                              const ExternalLoad& load, const NewtonConfig& cfg, const CouplingOptions& opt) {
    CoupledSolution out;
    out.method = method;
    switch (method) {
        case Method::atomistic: {
            auto [u, rep] = solve_atomistic(sys, load, cfg);
            out.lattice = std::move(u);
            out.report = rep;
            return out;
        }
        case Method::cb:
        case Method::hoc: {
            auto [u, rep] = method == Method::cb ? solve_cb(sys, load, cfg, opt.load_mode)
                                                 : solve_hoc(sys, load, cfg, opt.load_mode);
            out.field = std::move(u);
            out.report = rep;
            return out;
        }
        case Method::bqce:
        case Method::bqcf: {
            const LatticeCoupling lc(sys, BlendFunction(dd, opt.blend), opt.weighting);
            const std::vector<double> f = sample_load(load, sys);
            const std::size_t fixed[] = {sys.index(0)};
            std::vector<double> x0(f.size(), 0.0);
            std::vector<double> x;
            if (method == Method::bqce) {
                Objective obj;
                obj.value = [&](std::span<const double> u) { return lc.energy_bqce(u) - dot(f, u); };
                obj.gradient = [&](std::span<const double> u) { return minus(lc.gradient_bqce(u), f); };
                obj.hessian = [&](std::span<const double> u) { return lc.hessian_bqce(u); };
                x = newton_minimize(obj, std::move(x0), fixed, cfg, out.report);
            } else {
                Residual res;
                res.value = [&](std::span<const double> u) { return minus(lc.residual_bqcf(u), f); };
                res.jacobian = [&](std::span<const double> u) { return lc.jacobian_bqcf(u); };
                x = newton_root(res, std::move(x0), fixed, cfg, out.report);
            }
            x[sys.index(0)] = 0.0;
            out.lattice = LatticeFunction(sys, std::move(x));
            return out;
        }
        default: break;
    }

    auto space = coupled_space(sys, dd, opt);
    const MixedCoupling mc(sys, BlendFunction(dd, opt.blend), space, opt.weighting, opt.quadrature_order);
    const std::size_t fixed[] = {space->pinned_dof()};
    std::vector<double> x0(space->dof_count(), 0.0);
    std::vector<double> x;
    if (method == Method::bqhoce) {
        const std::vector<double> f = mc.external_bqhoce(load);
        Objective obj;
        obj.value = [&](std::span<const double> c) { return mc.energy_bqhoce(c) - dot(f, c); };
        obj.gradient = [&](std::span<const double> c) { return minus(mc.gradient_bqhoce(c), f); };
        obj.hessian = [&](std::span<const double> c) { return mc.hessian_bqhoce(c); };
        x = newton_minimize(obj, std::move(x0), fixed, cfg, out.report);
    } else {
        const std::vector<double> f = mc.load_bqhocf(load);
        Residual res;
        res.value = [&](std::span<const double> c) { return minus(mc.residual_bqhocf(c), f); };
        res.jacobian = [&](std::span<const double> c) { return mc.jacobian_bqhocf(c); };
        x = newton_root(res, std::move(x0), fixed, cfg, out.report);
    }
    out.field = MixedFEFunction(space, std::move(x));
    return out;
}

namespace {

// H1 seminorm Gram matrix of the space, pinned.
BandMatrix stiffness_gram(const MixedFESpace& space) {
    const Mesh1D& mesh = space.mesh();
    const QuadratureRule rule;
    std::vector<Triplet> trip;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto dofs = space.element_dofs(e);
        const double h = mesh.size(e);
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const auto n1 = element_basis(mesh.kind(e), h, rule.points()[qi], 1);
            for (std::size_t i = 0; i < dofs.size(); ++i) {
                for (std::size_t j = 0; j < dofs.size(); ++j) {
                    trip.push_back({dofs[i], dofs[j], rule.weights()[qi] * h * n1[i] * n1[j]});
                }
            }
        }
    }
    BandMatrix g = BandMatrix::from_triplets(space.dof_count(), trip);
    g.pin(space.pinned_dof());
    return g;
}

GhostForce norms(std::vector<double> g, std::size_t pin, const BandMatrix& gram) {
    g[pin] = 0.0;
    GhostForce out;
    out.l2 = std::sqrt(dot(g, g));
    auto y = cholesky_solve(gram, g);
    if (!y) throw NumericalError("ghost force: Gram matrix not positive definite");
    out.dual = std::sqrt(std::max(0.0, dot(g, *y)));
    return out;
}

}  // namespace

GhostForce ghost_force_diagnostic(Method method, const LatticeSystem& sys, const DomainDecomposition& dd,
                                  const CouplingOptions& opt) {
    const std::size_t n = static_cast<std::size_t>(sys.site_count());
    if (!method_uses_mixed_space(method)) {
        const std::vector<double> zero(n, 0.0);
        std::vector<double> g;
        if (method == Method::atomistic) {
            g = gradient_atomistic(sys, zero);
        } else {
            const LatticeCoupling lc(sys, BlendFunction(dd, opt.blend), opt.weighting);
            g = method == Method::bqce ? lc.gradient_bqce(zero) : lc.residual_bqcf(zero);
        }
        BandMatrix lap = nearest_neighbor_laplacian(n);
        lap.pin(sys.index(0));
        return norms(std::move(g), sys.index(0), lap);
    }

    std::shared_ptr<const MixedFESpace> space;
    std::vector<double> g;
    if (method == Method::cb || method == Method::hoc) {
        space = std::make_shared<const MixedFESpace>(
            build_uniform_mesh(sys, method == Method::cb ? ElementKind::affine : ElementKind::quintic));
        const ContinuumForm form{&sys, method == Method::cb ? ContinuumModel::cb : ContinuumModel::hoc, {}, false, {}};
        g = continuum_gradient(form, MixedFEFunction::zero(space), QuadratureRule(opt.quadrature_order));
    } else {
        space = coupled_space(sys, dd, opt);
        const MixedCoupling mc(sys, BlendFunction(dd, opt.blend), space, opt.weighting, opt.quadrature_order);
        const std::vector<double> zero(space->dof_count(), 0.0);
        g = method == Method::bqhoce ? mc.gradient_bqhoce(zero) : mc.residual_bqhocf(zero);
    }
    return norms(std::move(g), space->pinned_dof(), stiffness_gram(*space));
}

}  // namespace hocqc
