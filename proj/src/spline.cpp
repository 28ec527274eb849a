#include "hocqc/spline.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "hocqc/banded.hpp"

namespace hocqc {

std::pair<std::vector<double>, std::vector<double>> periodic_quintic_spline(const Mesh1D& mesh,
                                                                            std::span<const double> values) {
    const std::size_t m = mesh.node_count();
    if (values.size() != m) throw ConfigError("spline: one value per mesh node expected");

    // Unknowns per node k: S_k = hk u'_k and Q_k = hk^2 u''_k, hk the smaller
    // adjacent element. Rows: continuity of hk^3 u''' and hk^4 u'''' at node k.
    std::vector<double> hn(m);
    for (std::size_t k = 0; k < m; ++k) hn[k] = std::min(mesh.size(k), mesh.size((k + m - 1) % m));

    std::vector<Triplet> trip;
    std::vector<double> rhs(2 * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        for (int order = 3; order <= 4; ++order) {
            const std::size_t row = 2 * k + static_cast<std::size_t>(order - 3);
            const double rs = std::pow(hn[k], order);
            // Right element (t = 0) enters with +, left element (t = 1) with -.
            for (int side = 0; side < 2; ++side) {
                const std::size_t e = side == 0 ? k : (k + m - 1) % m;
                const double t = side == 0 ? 0.0 : 1.0;
                const double sign = side == 0 ? 1.0 : -1.0;
                const double h = mesh.size(e);
                const auto ref = hermite_reference(t, order);
                const double f = sign * rs * std::pow(h, -order);
                const std::size_t na = e;
                const std::size_t nb = (e + 1) % m;
                rhs[row] -= f * (ref[0] * values[na] + ref[3] * values[nb]);
                trip.push_back({row, 2 * na, f * ref[1] * h / hn[na]});
                trip.push_back({row, 2 * na + 1, f * ref[2] * (h / hn[na]) * (h / hn[na])});
                trip.push_back({row, 2 * nb, f * ref[4] * h / hn[nb]});
                trip.push_back({row, 2 * nb + 1, f * ref[5] * (h / hn[nb]) * (h / hn[nb])});
            }
        }
    }
    const BandMatrix a = BandMatrix::from_triplets(2 * m, trip);
    const std::vector<double> x = lu_solve(a, rhs);

    std::vector<double> d1(m);
    std::vector<double> d2(m);
    for (std::size_t k = 0; k < m; ++k) {
        d1[k] = x[2 * k] / hn[k];
        d2[k] = x[2 * k + 1] / (hn[k] * hn[k]);
    }
    return {std::move(d1), std::move(d2)};
}

MixedFEFunction interpolate_spline(std::shared_ptr<const MixedFESpace> space, std::span<const double> values) {
    const Mesh1D& mesh = space->mesh();
    const std::size_t m = mesh.node_count();
    if (values.size() != m) throw ConfigError("interpolate_spline: one value per mesh node expected");
    std::vector<double> c(space->dof_count(), 0.0);
    std::vector<double> d1;
    std::vector<double> d2;
    if (space->hermite_node_count() > 0) std::tie(d1, d2) = periodic_quintic_spline(mesh, values);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t o = space->node_dof(k);
        c[o] = values[k];
        if (space->hermite(k)) {
            c[o + 1] = d1[k];
            c[o + 2] = d2[k];
        }
    }
    return MixedFEFunction(std::move(space), std::move(c));
}

namespace {

std::vector<double> node_samples(const LatticeFunction& u, const Mesh1D& mesh) {
    if (u.half_count() != mesh.half_count()) throw ConfigError("lattice function and mesh differ in size");
    std::vector<double> v(mesh.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = u(mesh.node(k));
    return v;
}

}  // namespace

MixedFEFunction interpolate_mixed_Pi(const LatticeFunction& u, std::shared_ptr<const MixedFESpace> space) {
    const auto v = node_samples(u, space->mesh());
    return interpolate_spline(std::move(space), v);
}

MixedFEFunction interpolate_coarse_Pi_h(const LatticeFunction& u, std::shared_ptr<const MixedFESpace> space) {
    const auto v = node_samples(u, space->mesh());
    return interpolate_spline(std::move(space), v);
}

}  // namespace hocqc
