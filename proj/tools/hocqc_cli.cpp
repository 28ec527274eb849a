// hocqc: solve, converge, coarsen and ghost-force sweeps from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hocqc/atomistic.hpp"
#include "hocqc/harness.hpp"

namespace {

using namespace hocqc;

struct Options {
    std::vector<std::string> methods;
    std::vector<long> n;
    std::string potential = "harmonic";
    std::vector<int> range{1, 2};
    double fscale = 20.0;
    std::string load = "singular";
    int load_mode = 2;
    std::vector<long> la;
    std::vector<long> lb;
    double fraction = 0.125;
    std::vector<double> h_list;
    double tol = 1e-10;
    int max_iter = 50;
    std::string region;
    std::string weighting = "symmetric";
    std::string out;
};

ErrorRegion parse_region(const std::string& s) {
    if (s == "all") return ErrorRegion::all;
    if (s == "atomistic") return ErrorRegion::atomistic;
    if (s == "blend") return ErrorRegion::blend;
    if (s == "continuum") return ErrorRegion::continuum;
    throw ConfigError("unknown region '" + s + "'");
}

ExperimentConfig to_config(const Options& o, std::vector<Method> default_methods, ErrorRegion default_region) {
    ExperimentConfig cfg;
    cfg.methods.clear();
    for (const auto& m : o.methods) cfg.methods.push_back(parse_method(m));
    if (cfg.methods.empty()) cfg.methods = std::move(default_methods);
    if (!o.n.empty()) cfg.half_counts = o.n;
    cfg.potential = o.potential;
    cfg.range = o.range;
    cfg.f_scale = o.fscale;
    if (o.load == "singular") {
        cfg.load = LoadKind::singular;
    } else if (o.load == "smooth") {
        cfg.load = LoadKind::smooth;
    } else {
        throw ConfigError("unknown load '" + o.load + "' (expected singular or smooth)");
    }
    cfg.load_mode = o.load_mode;
    cfg.decomposition_fraction = o.fraction;
    if (!o.la.empty()) cfg.la = o.la.front();
    if (!o.lb.empty()) cfg.lb = o.lb.front();
    cfg.h_list = o.h_list;
    cfg.region = o.region.empty() ? default_region : parse_region(o.region);
    cfg.newton.tol = o.tol;
    cfg.newton.max_iter = o.max_iter;
    if (o.weighting == "symmetric") {
        cfg.coupling.weighting = BondWeighting::symmetric;
    } else if (o.weighting == "left") {
        cfg.coupling.weighting = BondWeighting::left_site;
    } else {
        throw ConfigError("unknown bond weighting '" + o.weighting + "' (expected symmetric or left)");
    }
    cfg.validate();
    return cfg;
}

void print_study(const StudyResult& res, const char* axis) {
    for (const auto& r : res.records) {
        std::printf("%-9s N=%-7ld %s=%-10.4g rel=%.4e abs=%.4e it=%d\n", method_name(r.method), r.half_count, axis,
                    r.resolution, r.rel_error, r.abs_error, r.iterations);
    }
    for (const auto& [m, fit] : res.slopes) {
        std::printf("slope %-9s %.3f (r2 %.4f, %zu points)\n", method_name(m), fit.slope, fit.r2, fit.used);
    }
    for (const auto& [m, msg] : res.failures) std::printf("partial %-9s %s\n", method_name(m), msg.c_str());
    for (const auto& w : res.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int run_solve(const Options& o) {
    const ExperimentConfig cfg = to_config(o, {Method::bqhocf}, ErrorRegion::all);
    const LatticeSystem sys = cfg.system(cfg.half_counts.front());
    const ExternalLoad load = cfg.external_load();
    const DomainDecomposition dd = cfg.decomposition(sys);
    const LatticeFunction u_ref = solve_atomistic(sys, load, cfg.newton).first;
    std::vector<CoupledSolution> sols;
    for (Method m : cfg.methods) {
        sols.push_back(solve_coupled(m, sys, dd, load, cfg.newton, cfg.coupling));
        const auto& s = sols.back();
        const StrainError err = strain_error(sys, dd, u_ref, s, cfg.region);
        std::printf("method=%s N=%ld iterations=%d residual=%.3e converged=%d rel_error=%.6e time=%.3fs\n",
                    method_name(m), sys.half_count(), s.report.iterations, s.report.final_residual_norm,
                    s.report.converged ? 1 : 0, err.relative, s.report.wall_time);
    }
    dump_strain_profile(sys, dd, u_ref, sols, o.out.empty() ? "strain.csv" : o.out);
    return 0;
}

int run_converge(const Options& o) {
    const ExperimentConfig cfg = to_config(o, ExperimentConfig{}.methods, ErrorRegion::all);
    const StudyResult res = run_convergence_study(cfg);
    write_records_csv(o.out.empty() ? "convergence.csv" : o.out, res.records);
    print_study(res, "eps");
    return res.partial() ? 3 : 0;
}

int run_coarsen(const Options& o) {
    Options p = o;
    if (p.n.empty()) p.n = {10000};
    if (p.la.empty()) p.la = {100};
    if (p.lb.empty()) p.lb = {100};
    if (p.h_list.empty()) p.h_list = {2000, 1000, 500, 250};
    const ExperimentConfig cfg = to_config(p, {Method::bqhoce}, ErrorRegion::continuum);
    const StudyResult res = run_coarsening_study(cfg);
    write_records_csv(o.out.empty() ? "coarsening.csv" : o.out, res.records);
    print_study(res, "h");
    return res.partial() ? 3 : 0;
}

int run_ghost(const Options& o) {
    Options p = o;
    if (p.n.empty()) p.n = {512};
    if (p.la.empty()) p.la = {32};
    if (p.lb.empty()) p.lb = {8, 16, 32, 64};
    p.methods.resize(std::min<std::size_t>(p.methods.size(), 1));
    const ExperimentConfig cfg = to_config(p, {Method::bqce}, ErrorRegion::all);
    const Method m = cfg.methods.front();
    const LatticeSystem sys = cfg.system(cfg.half_counts.front());
    std::ofstream out(o.out.empty() ? "ghost.csv" : o.out);
    if (!out) throw Error("cannot open ghost output file");
    out << "method,lb,l2,dual\n";
    std::vector<double> widths, duals;
    for (long lb : p.lb) {
        const DomainDecomposition dd(sys, p.la.front(), lb);
        const GhostForce g = ghost_force_diagnostic(m, sys, dd, cfg.coupling);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%ld,%.17g,%.17g\n", method_name(m), lb, g.l2, g.dual);
        out << buf;
        std::printf("%s lb=%-5ld l2=%.4e dual=%.4e\n", method_name(m), lb, g.l2, g.dual);
        widths.push_back(static_cast<double>(lb));
        duals.push_back(g.dual);
    }
    if (widths.size() >= 2) {
        std::vector<std::string> warnings;
        try {
            const SlopeFit fit = fit_slope(widths, duals, &warnings);
            std::printf("slope dual vs lb %.3f (r2 %.4f)\n", fit.slope, fit.r2);
        } catch (const Error& e) {
            std::printf("slope unavailable: %s\n", e.what());
        }
    }
    return 0;
}

void add_common(CLI::App& app, Options& o) {
    app.add_option("--method", o.methods, "Method(s): atomistic cb hoc bqce bqcf bqhoce bqhocf")->delimiter(',');
    app.add_option("--n", o.n, "Half count(s) N")->delimiter(',');
    app.add_option("--potential", o.potential, "harmonic or lj");
    app.add_option("--range", o.range, "Interaction range, e.g. 1,2")->delimiter(',');
    app.add_option("--fscale", o.fscale, "Load scale");
    app.add_option("--load", o.load, "singular or smooth");
    app.add_option("--load-mode", o.load_mode, "Wave number of the smooth load");
    app.add_option("--la", o.la, "Atomistic half width")->delimiter(',');
    app.add_option("--lb", o.lb, "Blend width(s)")->delimiter(',');
    app.add_option("--fraction", o.fraction, "L_a = L_b = round(fraction 2N) when not given");
    app.add_option("--h-list", o.h_list, "Coarse element sizes")->delimiter(',');
    app.add_option("--tol", o.tol, "Newton tolerance");
    app.add_option("--max-iter", o.max_iter, "Newton iteration cap");
    app.add_option("--region", o.region, "Error region: all atomistic blend continuum");
    app.add_option("--weighting", o.weighting, "Bond weighting: symmetric or left");
    app.add_option("--out", o.out, "Output CSV path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blended atomistic / higher-order continuum coupling in one dimension"};
    app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    Options opts;
    add_common(app, opts);
    auto* solve = app.add_subcommand("solve", "Solve one system and write the strain profile");
    auto* converge = app.add_subcommand("converge", "Convergence study in eps");
    auto* coarsen = app.add_subcommand("coarsen", "Coarsening study in h");
    auto* ghost = app.add_subcommand("ghost", "Ghost-force sweep over blend widths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) return run_solve(opts);
        if (converge->parsed()) return run_converge(opts);
        if (coarsen->parsed()) return run_coarsen(opts);
        if (ghost->parsed()) return run_ghost(opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "error kind=%s message=\"%s\"\n", e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error kind=internal message=\"%s\"\n", e.what());
        return 2;
    }
    return 1;
}
