#include "hocqc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hocqc/atomistic.hpp"
#include "hocqc/spline.hpp"

namespace hocqc {

const char* region_label(ErrorRegion r) noexcept {
    switch (r) {
        case ErrorRegion::atomistic: return "atomistic";
        case ErrorRegion::blend: return "blend";
        case ErrorRegion::continuum: return "continuum";
        default: return "all";
    }
}

namespace {

bool in_region(const DomainDecomposition& dd, ErrorRegion region, double left, double h) {
    switch (region) {
        case ErrorRegion::all: return true;
        case ErrorRegion::atomistic: return dd.element_region(left, h) == Region::atomistic;
        case ErrorRegion::blend: return dd.element_region(left, h) == Region::blend;
        default: return dd.element_region(left, h) == Region::continuum;
    }
}

}  // namespace

MixedFEFunction reference_field(const LatticeSystem& sys, const DomainDecomposition& dd,
                                const LatticeFunction& u_ref, const CoupledSolution& sol) {
    if (!sol.field) return interpolate_P1(sys, u_ref);
    const auto space = sol.field->space_ptr();
    if (space->mesh().is_unit()) return interpolate_mixed_Pi(u_ref, space);
    // Coarse solutions are measured against the fine canonical interpolant.
    return interpolate_mixed_Pi(u_ref, std::make_shared<const MixedFESpace>(build_canonical_mesh(sys, dd)));
}

StrainError strain_error(const LatticeSystem& sys, const DomainDecomposition& dd, const LatticeFunction& u_ref,
                         const CoupledSolution& sol, ErrorRegion region, const QuadratureRule& rule) {
    const MixedFEFunction ref = reference_field(sys, dd, u_ref, sol);
    const MixedFEFunction um = sol.as_field(sys);
    // Quadrature runs over the reference mesh; every coarse element is a union of its cells.
    const Mesh1D& mesh = ref.space().mesh();
    const bool same_mesh = mesh.element_count() == um.space().mesh().element_count();
    double num = 0.0;
    double den = 0.0;
    bool any = false;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double h = mesh.size(e);
        const double left = mesh.left(e);
        const bool take = in_region(dd, region, left, h);
        any = any || take;
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const double t = rule.points()[qi];
            const double w = rule.weights()[qi] * h;
            const double r1 = ref.on_element(e, t, 1);
            den += w * r1 * r1;
            if (!take) continue;
            const double m1 = same_mesh ? um.on_element(e, t, 1) : um(left + h * t, 1);
            num += w * (r1 - m1) * (r1 - m1);
        }
    }
    if (!any) throw ConfigError(std::string("strain_error: region '") + region_label(region) + "' is empty");
    StrainError out;
    out.absolute = std::sqrt(num);
    out.relative = den > 0.0 ? out.absolute / std::sqrt(den) : 0.0;
    return out;
}

HocIndicator error_indicator_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const ExternalLoad& load,
                                 const std::optional<DomainDecomposition>& dd, ErrorRegion region,
                                 const QuadratureRule& rule) {
    const Mesh1D& mesh = u.space().mesh();
    double i5 = 0.0, i24 = 0.0, i322 = 0.0, l4 = 0.0, l8 = 0.0, f3 = 0.0;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const double h = mesh.size(e);
        if (dd && !in_region(*dd, region, mesh.left(e), h)) continue;
        for (int q = 0; q < rule.order(); ++q) {
            const auto qi = static_cast<std::size_t>(q);
            const double t = rule.points()[qi];
            const double w = rule.weights()[qi] * h;
            const double u2 = u.on_element(e, t, 2);
            const double u3 = u.on_element(e, t, 3);
            const double u4 = u.on_element(e, t, 4);
            const double u5 = u.on_element(e, t, 5);
            const double g = load.density_third_derivative(sys, mesh.left(e) + h * t);
            i5 += w * u5 * u5;
            i24 += w * (u2 * u4) * (u2 * u4);
            i322 += w * (u3 * u2 * u2) * (u3 * u2 * u2);
            l4 += w * std::pow(u3, 4);
            l8 += w * std::pow(u2, 8);
            f3 += w * g * g;
        }
    }
    HocIndicator out;
    out.terms = {std::sqrt(i5), std::sqrt(i24), std::sqrt(i322), std::sqrt(l4) * std::sqrt(l8), std::sqrt(f3)};
    for (double v : out.terms) out.total += v;
    return out;
}

// ---------------------------------------------------------------------------
// Configuration

PairPotential make_potential(const std::string& name) {
    if (name == "harmonic") return PairPotential::harmonic();
    if (name == "lj" || name == "lennard_jones") return PairPotential::lennard_jones();
    throw ConfigError("unknown potential '" + name + "' (expected harmonic or lj)");
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw ConfigError("no methods requested");
    if (half_counts.empty()) throw ConfigError("no resolutions requested");
    for (long n : half_counts) {
        if (n < 2) throw ConfigError("half count must be at least 2");
    }
    if (!std::isfinite(f_scale)) throw ConfigError("f_scale must be finite");
    if (!(decomposition_fraction > 0.0 && decomposition_fraction < 0.5)) {
        throw ConfigError("decomposition fraction must lie in (0, 1/2)");
    }
    for (double h : h_list) {
        if (!(h >= 1.0)) throw ConfigError("coarse element sizes must be at least 1");
    }
    if (load == LoadKind::user) throw ConfigError("user loads cannot be configured from a study");
    if (load_mode < 1) throw ConfigError("smooth load wave number must be positive");
    make_potential(potential);
    newton.validate();
}

LatticeSystem ExperimentConfig::system(long half_count) const {
    return LatticeSystem(half_count, macro_strain, range, make_potential(potential));
}

ExternalLoad ExperimentConfig::external_load() const {
    if (load == LoadKind::smooth) return ExternalLoad::smooth(f_scale, load_mode);
    return ExternalLoad::singular(f_scale);
}

DomainDecomposition ExperimentConfig::decomposition(const LatticeSystem& sys) const {
    const long fallback = std::lround(decomposition_fraction * static_cast<double>(sys.site_count()));
    return DomainDecomposition(sys, la.value_or(fallback), lb.value_or(fallback));
}

// ---------------------------------------------------------------------------
// Slopes

SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::vector<std::string>* warnings) {
    if (x.size() != y.size()) throw ConfigError("fit_slope: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
            if (warnings) warnings->push_back("fit_slope: dropped nonpositive point " + std::to_string(i));
            continue;
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 2) throw NumericalError("fit_slope: fewer than two usable points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw NumericalError("fit_slope: all resolutions coincide");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.used = lx.size();
    return fit;
}

SlopeFit fit_slope(std::span<const ConvergenceRecord> records, std::vector<std::string>* warnings) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        x.push_back(r.resolution);
        y.push_back(r.rel_error);
    }
    return fit_slope(x, y, warnings);
}

std::vector<ConvergenceRecord> StudyResult::series(Method m) const {
    std::vector<ConvergenceRecord> out;
    for (const auto& r : records) {
        if (r.method == m) out.push_back(r);
    }
    return out;
}

namespace {

void finish(StudyResult& res, const std::vector<Method>& methods) {
    for (Method m : methods) {
        const auto s = res.series(m);
        if (s.size() < 2) continue;
        try {
            res.slopes[m] = fit_slope(std::span<const ConvergenceRecord>(s), &res.warnings);
        } catch (const Error& e) {
            res.warnings.push_back(std::string(method_name(m)) + ": " + e.what());
        }
    }
}

ConvergenceRecord make_record(Method m, double resolution, long n, const StrainError& err, const SolveReport& rep) {
    ConvergenceRecord r;
    r.method = m;
    r.resolution = resolution;
    r.half_count = n;
    r.abs_error = err.absolute;
    r.rel_error = err.relative;
    r.iterations = rep.iterations;
    r.converged = rep.converged;
    return r;
}

}  // namespace

StudyResult run_convergence_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.half_counts.size() < 3) throw ConfigError("convergence study needs at least three resolutions");
    StudyResult res;
    for (long n : cfg.half_counts) {
        const LatticeSystem sys = cfg.system(n);
        const ExternalLoad load = cfg.external_load();
        const DomainDecomposition dd = cfg.decomposition(sys);
        std::optional<LatticeFunction> u_ref;
        try {
            u_ref = solve_atomistic(sys, load, cfg.newton).first;
        } catch (const Error& e) {
            // Without a reference no method can be scored past this point.
            for (Method m : cfg.methods) {
                if (!res.failures.count(m)) res.failures[m] = "N=" + std::to_string(n) + ": reference: " + e.what();
            }
            break;
        }
        for (Method m : cfg.methods) {
            if (res.failures.count(m)) continue;
            try {
                const CoupledSolution sol = solve_coupled(m, sys, dd, load, cfg.newton, cfg.coupling);
                const StrainError err = strain_error(sys, dd, *u_ref, sol, cfg.region);
                res.records.push_back(make_record(m, sys.spacing(), n, err, sol.report));
            } catch (const Error& e) {
                res.failures[m] = "N=" + std::to_string(n) + ": " + e.what();
            }
        }
    }
    finish(res, cfg.methods);
    return res;
}

StudyResult run_coarsening_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.h_list.size() < 3) throw ConfigError("coarsening study needs at least three element sizes");
    const long n = cfg.half_counts.front();
    const LatticeSystem sys = cfg.system(n);
    const ExternalLoad load = cfg.external_load();
    const DomainDecomposition dd = cfg.decomposition(sys);
    const LatticeFunction u_ref = solve_atomistic(sys, load, cfg.newton).first;
    StudyResult res;
    for (Method m : cfg.methods) {
        if (m != Method::bqhoce && m != Method::bqhocf) {
            throw ConfigError(std::string("coarsening applies to bqhoce/bqhocf, not ") + method_name(m));
        }
    }
    for (double h : cfg.h_list) {
        CouplingOptions opt = cfg.coupling;
        opt.target_h = h;
        for (Method m : cfg.methods) {
            if (res.failures.count(m)) continue;
            try {
                const CoupledSolution sol = solve_coupled(m, sys, dd, load, cfg.newton, opt);
                const StrainError err = strain_error(sys, dd, u_ref, sol, cfg.region);
                res.records.push_back(make_record(m, h, n, err, sol.report));
            } catch (const Error& e) {
                res.failures[m] = "h=" + std::to_string(h) + ": " + e.what();
            }
        }
    }
    finish(res, cfg.methods);
    return res;
}

// ---------------------------------------------------------------------------
// CSV

void write_records_csv(const std::string& path, std::span<const ConvergenceRecord> records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "method,resolution,half_count,abs_error,rel_error,iterations,converged\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%ld,%.17g,%.17g,%d,%d\n", method_name(r.method), r.resolution,
                      r.half_count, r.abs_error, r.rel_error, r.iterations, r.converged ? 1 : 0);
        out << buf;
    }
    if (!out) throw Error("write to '" + path + "' failed");
}

std::vector<ConvergenceRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<ConvergenceRecord> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell[7];
        for (auto& c : cell) {
            if (!std::getline(ss, c, ',')) throw Error("malformed record line: " + line);
        }
        ConvergenceRecord r;
        r.method = parse_method(cell[0]);
        r.resolution = std::stod(cell[1]);
        r.half_count = std::stol(cell[2]);
        r.abs_error = std::stod(cell[3]);
        r.rel_error = std::stod(cell[4]);
        r.iterations = std::stoi(cell[5]);
        r.converged = cell[6] == "1";
        out.push_back(r);
    }
    return out;
}

void dump_strain_profile(const LatticeSystem& sys, const DomainDecomposition& dd, const LatticeFunction& u_ref,
                         std::span<const CoupledSolution> solutions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    const double c = static_cast<double>(dd.center());
    const double la = static_cast<double>(dd.atomistic_half_width());
    const double lb = static_cast<double>(dd.blend_width());
    out << "# interfaces: " << c - la - lb << ' ' << c - la << ' ' << c + la << ' ' << c + la + lb << '\n';
    out << "x,strain_atomistic";
    std::vector<MixedFEFunction> fields;
    for (const auto& s : solutions) {
        out << ",strain_" << method_name(s.method);
        fields.push_back(s.as_field(sys));
    }
    out << '\n';
    char buf[64];
    for (Site xi = sys.first_site() - 1; xi < sys.last_site(); ++xi) {
        const double x = static_cast<double>(xi) + 0.5;
        std::snprintf(buf, sizeof buf, "%.1f,%.17g", x, u_ref(xi + 1) - u_ref(xi));
        out << buf;
        for (const auto& f : fields) {
            std::snprintf(buf, sizeof buf, ",%.17g", f(x, 1));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace hocqc
