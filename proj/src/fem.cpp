#include "hocqc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hocqc {

// ---------------------------------------------------------------------------
// Mesh

Mesh1D::Mesh1D(long half_count, std::vector<long> nodes, std::vector<ElementKind> kinds,
               std::optional<DomainDecomposition> decomposition)
    : half_count_(half_count),
      nodes_(std::move(nodes)),
      kinds_(std::move(kinds)),
      decomposition_(std::move(decomposition)) {
    if (nodes_.empty()) throw ConfigError("mesh needs at least one node");
    if (kinds_.size() != nodes_.size()) throw ConfigError("mesh: one element kind per node expected");
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (nodes_[k] <= -half_count_ || nodes_[k] > half_count_) {
            throw ConfigError("mesh node " + std::to_string(nodes_[k]) + " outside (-N, N]");
        }
        if (k > 0 && nodes_[k] <= nodes_[k - 1]) throw ConfigError("mesh nodes must be strictly increasing");
    }
}

double Mesh1D::size(std::size_t e) const noexcept {
    const std::size_t m = nodes_.size();
    if (e + 1 < m) return static_cast<double>(nodes_[e + 1] - nodes_[e]);
    return static_cast<double>(nodes_[0] + 2 * half_count_ - nodes_[e]);
}

bool Mesh1D::all_affine() const noexcept {
    return std::all_of(kinds_.begin(), kinds_.end(), [](ElementKind k) { return k == ElementKind::affine; });
}

bool Mesh1D::all_quintic() const noexcept {
    return std::all_of(kinds_.begin(), kinds_.end(), [](ElementKind k) { return k == ElementKind::quintic; });
}

bool Mesh1D::is_unit() const noexcept { return nodes_.size() == static_cast<std::size_t>(2 * half_count_); }

std::optional<std::size_t> Mesh1D::node_at(Site xi) const noexcept {
    const long p = 2 * half_count_;
    long y = ((xi + half_count_ - 1) % p + p) % p - half_count_ + 1;
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), y);
    if (it == nodes_.end() || *it != y) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::pair<std::size_t, double> Mesh1D::locate(double x) const noexcept {
    const double x0 = static_cast<double>(nodes_[0]);
    const double p = period();
    double y = std::fmod(x - x0, p);
    if (y < 0.0) y += p;
    y += x0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y,
                               [](double v, long n) { return v < static_cast<double>(n); });
    const std::size_t e = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    double t = (y - left(e)) / size(e);
    t = std::clamp(t, 0.0, 1.0);
    return {e, t};
}

Mesh1D build_canonical_mesh(const LatticeSystem& sys, const DomainDecomposition& dd) {
    if (dd.half_count() != sys.half_count()) throw ConfigError("decomposition belongs to a different system");
    const long n = sys.half_count();
    std::vector<long> nodes;
    std::vector<ElementKind> kinds;
    for (long x = -n + 1; x <= n; ++x) {
        nodes.push_back(x);
        kinds.push_back(dd.element_region(static_cast<double>(x), 1.0) == Region::atomistic ? ElementKind::affine
                                                                                         : ElementKind::quintic);
    }
    return Mesh1D(n, std::move(nodes), std::move(kinds), dd);
}

Mesh1D build_uniform_mesh(const LatticeSystem& sys, ElementKind kind) {
    const long n = sys.half_count();
    std::vector<long> nodes;
    for (long x = -n + 1; x <= n; ++x) nodes.push_back(x);
    std::vector<ElementKind> kinds(nodes.size(), kind);
    return Mesh1D(n, std::move(nodes), std::move(kinds));
}

Mesh1D build_coarse_mesh(const LatticeSystem& sys, const DomainDecomposition& dd, double target_h) {
    if (!(target_h >= 1.0)) throw ConfigError("coarse mesh: target_h must be at least 1");
    const long lc = dd.continuum_length();
    if (lc == 0) throw ConfigError("coarse mesh: decomposition has no continuum region");
    if (target_h > static_cast<double>(lc)) {
        throw ConfigError("coarse mesh: target_h exceeds the continuum region length " + std::to_string(lc));
    }
    const long n = sys.half_count();
    const long c = dd.center();
    const long inner = dd.atomistic_half_width() + dd.blend_width();
    const long half = n - inner;
    const long m = std::max(1L, std::lround(static_cast<double>(half) / target_h));

    std::vector<long> raw;
    for (long x = c - inner; x <= c + inner; ++x) raw.push_back(x);
    for (long k = 1; k <= m; ++k) {
        const long step = std::lround(static_cast<double>(k * half) / static_cast<double>(m));
        raw.push_back(c + inner + step);
        if (k < m) raw.push_back(c - inner - step);
    }
    const long p = 2 * n;
    for (long& x : raw) x = ((x + n - 1) % p + p) % p - n + 1;
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    std::vector<ElementKind> kinds(raw.size());
    for (std::size_t e = 0; e < raw.size(); ++e) {
        const double left = static_cast<double>(raw[e]);
        const double h = (e + 1 < raw.size() ? static_cast<double>(raw[e + 1]) : static_cast<double>(raw[0] + p)) - left;
        kinds[e] = dd.element_region(left, h) == Region::atomistic ? ElementKind::affine : ElementKind::quintic;
    }
    return Mesh1D(n, std::move(raw), std::move(kinds), dd);
}

// ---------------------------------------------------------------------------
// Quadrature

QuadratureRule::QuadratureRule(int n) {
    if (n < 1) throw ConfigError("quadrature order must be positive");
    points_.resize(static_cast<std::size_t>(n));
    weights_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton on the Legendre polynomial from the Chebyshev-like guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        points_[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        weights_[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
}

double integrate(const QuadratureRule& rule, const Mesh1D& mesh, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double x0 = mesh.left(e);
        const double h = mesh.size(e);
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            s += rule.weights()[qi] * h * f(x0 + h * rule.points()[qi]);
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hermite quintic element

namespace {

// Monomial coefficients (t^0..t^5) of the reference basis.
constexpr double kHermite[6][6] = {
    {1, 0, 0, -10, 15, -6},
    {0, 1, 0, -6, 8, -3},
    {0, 0, 0.5, -1.5, 1.5, -0.5},
    {0, 0, 0, 10, -15, 6},
    {0, 0, 0, -4, 7, -3},
    {0, 0, 0, 0.5, -1, 0.5},
};

}  // namespace

std::array<double, 6> hermite_reference(double t, int order) {
    if (order < 0 || order > 5) throw RangeError("hermite derivative order " + std::to_string(order) + " not in 0..5");
    std::array<double, 6> out{};
    for (int k = 0; k < 6; ++k) {
        double s = 0.0;
        for (int p = 5; p >= order; --p) {
            double falling = 1.0;
            for (int j = 0; j < order; ++j) falling *= p - j;
            s = s * t + kHermite[k][p] * falling;
        }
        out[static_cast<std::size_t>(k)] = s;
    }
    return out;
}

std::array<double, 6> element_basis(ElementKind kind, double h, double t, int order) {
    std::array<double, 6> out{};
    if (kind == ElementKind::affine) {
        if (order < 0 || order > 5) throw RangeError("derivative order " + std::to_string(order) + " not in 0..5");
        if (order == 0) {
            out[0] = 1.0 - t;
            out[1] = t;
        } else if (order == 1) {
            out[0] = -1.0 / h;
            out[1] = 1.0 / h;
        }
        return out;
    }
    out = hermite_reference(t, order);
    const double scale[6] = {1.0, h, h * h, 1.0, h, h * h};
    const double inv = std::pow(h, -order);
    for (std::size_t k = 0; k < 6; ++k) out[k] *= scale[k] * inv;
    return out;
}

double hermite_quintic_eval(double h, std::span<const double, 6> coeffs, double x, int order) {
    const auto b = element_basis(ElementKind::quintic, h, x / h, order);
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) s += b[k] * coeffs[k];
    return s;
}

// ---------------------------------------------------------------------------
// Mixed space

MixedFESpace::MixedFESpace(Mesh1D mesh) : mesh_(std::move(mesh)) {
    const std::size_t m = mesh_.node_count();
    multiplicity_.assign(m, 1);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t prev = (k + m - 1) % m;
        if (mesh_.kind(k) == ElementKind::quintic || mesh_.kind(prev) == ElementKind::quintic) multiplicity_[k] = 3;
    }
    offset_.resize(m);
    std::size_t acc = 0;
    for (std::size_t k = 0; k < m; ++k) {
        offset_[k] = acc;
        acc += static_cast<std::size_t>(multiplicity_[k]);
    }
    dof_count_ = acc;

    element_dofs_.resize(m);
    for (std::size_t e = 0; e < m; ++e) {
        const std::size_t a = offset_[e];
        const std::size_t b = offset_[(e + 1) % m];
        if (mesh_.kind(e) == ElementKind::affine) {
            element_dofs_[e] = {a, b};
        } else {
            element_dofs_[e] = {a, a + 1, a + 2, b, b + 1, b + 2};
        }
        for (std::size_t i : element_dofs_[e]) {
            for (std::size_t j : element_dofs_[e]) {
                const std::size_t d = i > j ? i - j : j - i;
                width_ = std::max(width_, std::min(d, dof_count_ - d));
            }
        }
    }

    const auto zero = mesh_.node_at(0);
    if (!zero) throw ConfigError("mixed space: x = 0 must be a mesh node");
    pin_ = offset_[*zero];
}

std::size_t MixedFESpace::hermite_node_count() const noexcept {
    return static_cast<std::size_t>(std::count(multiplicity_.begin(), multiplicity_.end(), 3));
}

std::span<const std::size_t> MixedFESpace::element_dofs(std::size_t e) const noexcept { return element_dofs_[e]; }

PointFunctional MixedFESpace::functional(double x, int order) const {
    const auto [e, t] = mesh_.locate(x);
    const auto b = element_basis(mesh_.kind(e), mesh_.size(e), t, order);
    const auto dofs = element_dofs(e);
    PointFunctional f;
    f.count = static_cast<int>(dofs.size());
    for (std::size_t k = 0; k < dofs.size(); ++k) {
        f.dof[k] = dofs[k];
        f.weight[k] = b[k];
    }
    return f;
}

MixedFEFunction::MixedFEFunction(std::shared_ptr<const MixedFESpace> space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != space_->dof_count()) throw ConfigError("coefficient vector does not match the space");
}

MixedFEFunction MixedFEFunction::zero(std::shared_ptr<const MixedFESpace> space) {
    const std::size_t n = space->dof_count();
    return MixedFEFunction(std::move(space), std::vector<double>(n, 0.0));
}

double MixedFEFunction::on_element(std::size_t e, double t, int order) const {
    const Mesh1D& mesh = space_->mesh();
    const auto b = element_basis(mesh.kind(e), mesh.size(e), t, order);
    const auto dofs = space_->element_dofs(e);
    double s = 0.0;
    for (std::size_t k = 0; k < dofs.size(); ++k) s += b[k] * coeffs_[dofs[k]];
    return s;
}

double MixedFEFunction::operator()(double x, int order) const {
    const auto [e, t] = space_->mesh().locate(x);
    return on_element(e, t, order);
}

double MixedFEFunction::jump(std::size_t node, int order) const {
    const std::size_t m = space_->mesh().element_count();
    return on_element(node, 0.0, order) - on_element((node + m - 1) % m, 1.0, order);
}

MixedFEFunction interpolate_P1(std::shared_ptr<const MixedFESpace> space, std::span<const double> node_values) {
    if (!space->mesh().all_affine()) throw ConfigError("interpolate_P1 needs an all-affine space");
    if (node_values.size() != space->mesh().node_count()) throw ConfigError("interpolate_P1: one value per node");
    return MixedFEFunction(std::move(space), std::vector<double>(node_values.begin(), node_values.end()));
}

MixedFEFunction interpolate_P1(const LatticeSystem& sys, const LatticeFunction& u) {
    auto space = std::make_shared<const MixedFESpace>(build_uniform_mesh(sys, ElementKind::affine));
    return interpolate_P1(std::move(space), u.values());
}

}  // namespace hocqc
