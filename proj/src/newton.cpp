#include "hocqc/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <string>

namespace hocqc {

void NewtonConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("newton: tol must be positive");
    if (max_iter < 1) throw ConfigError("newton: max_iter must be at least 1");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ConfigError("newton: backtrack factor must lie in (0,1)");
    if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("newton: armijo constant must lie in (0,1/2)");
}

double NewtonConfig::threshold(double initial_norm) const noexcept {
    return relative ? tol * std::max(1.0, initial_norm) : tol;
}

namespace {

using Clock = std::chrono::steady_clock;

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void clear_fixed(std::vector<double>& v, std::span<const std::size_t> fixed) {
    for (std::size_t i : fixed) v[i] = 0.0;
}

void pin_fixed(BandMatrix& a, std::span<const std::size_t> fixed) {
    for (std::size_t i : fixed) a.pin(i);
}

std::vector<double> axpy(std::span<const double> x, double t, std::span<const double> p) {
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * p[i];
    return y;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// NaN/inf or a domain error at a trial point counts as a rejected trial.
template <class F>
double safe_eval(F&& f) {
    try {
        const double v = f();
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

std::vector<double> newton_minimize(const Objective& obj, std::vector<double> x,
                                    std::span<const std::size_t> fixed, const NewtonConfig& cfg,
                                    SolveReport& report) {
    cfg.validate();
    const auto t0 = Clock::now();
    report = SolveReport{};
    double e = obj.value(x);
    report.merit.push_back(e);
    double stop = 0.0;

    for (int it = 0;; ++it) {
        std::vector<double> g = obj.gradient(x);
        clear_fixed(g, fixed);
        const double gnorm = sup_norm(g);
        if (it == 0) stop = cfg.threshold(gnorm);
        report.iterations = it;
        report.final_residual_norm = gnorm;
        report.energy = e;
        report.wall_time = seconds_since(t0);
        if (gnorm <= stop) {
            report.converged = true;
            return x;
        }
        if (it == cfg.max_iter) {
            throw NonConvergence("newton_minimize: max_iter reached (|g| = " + sci(gnorm) + ")", x,
                                 report);
        }

        BandMatrix h = obj.hessian(x);
        pin_fixed(h, fixed);
        std::vector<double> rhs(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
        auto p = cholesky_solve(h, rhs);
        report.last_factor = FactorPath::cholesky;
        if (!p) {
            const double tau = 0.1 * std::max(h.max_abs_diagonal(), 1e-12);
            h.shift_diagonal(tau);
            for (std::size_t i : fixed) h.set(i, i, 1.0);
            p = cholesky_solve(h, rhs);
            report.shifted = true;
            if (!p) throw NumericalError("newton_minimize: Hessian indefinite after diagonal shift");
        }
        clear_fixed(*p, fixed);

        const double slope = dot(g, *p);
        // Once the predicted decrease is below the roundoff of E, energy
        // comparisons are noise; judge the full step by the gradient instead.
        const bool in_noise = -slope <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(e));
        double t = 1.0;
        bool accepted = false;
        std::vector<double> trial;
        double et = 0.0;
        for (int k = 0; !in_noise && k <= cfg.max_backtracks; ++k, t *= cfg.backtrack) {
            trial = axpy(x, t, *p);
            et = safe_eval([&] { return obj.value(trial); });
            if (et <= e + cfg.armijo * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Near a minimizer the energy decrease drops below roundoff; fall
            // back on the gradient norm for the full step.
            trial = axpy(x, 1.0, *p);
            std::vector<double> gt;
            try {
                gt = obj.gradient(trial);
            } catch (const DomainError&) {
                throw NonConvergence("newton_minimize: line search failed", x, report);
            }
            clear_fixed(gt, fixed);
            if (!(sup_norm(gt) < gnorm)) throw NonConvergence("newton_minimize: line search failed", x, report);
            et = obj.value(trial);
        }
        x = std::move(trial);
        e = et;
        report.merit.push_back(e);
    }
}

std::vector<double> newton_root(const Residual& res, std::vector<double> x, std::span<const std::size_t> fixed,
                                const NewtonConfig& cfg, SolveReport& report) {
    cfg.validate();
    const auto t0 = Clock::now();
    report = SolveReport{};
    std::vector<double> r = res.value(x);
    clear_fixed(r, fixed);
    double m = 0.5 * dot(r, r);
    report.merit.push_back(m);
    const double stop = cfg.threshold(sup_norm(r));

    for (int it = 0;; ++it) {
        const double rnorm = sup_norm(r);
        report.iterations = it;
        report.final_residual_norm = rnorm;
        report.wall_time = seconds_since(t0);
        if (rnorm <= stop) {
            report.converged = true;
            return x;
        }
        if (it == cfg.max_iter) {
            throw NonConvergence("newton_root: max_iter reached (|r| = " + sci(rnorm) + ")", x, report);
        }

        BandMatrix j = res.jacobian(x);
        pin_fixed(j, fixed);
        std::vector<double> rhs(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
        LinearSolveInfo info;
        std::vector<double> p = banded_solve(j, rhs, &info);
        report.last_factor = info.path;
        clear_fixed(p, fixed);

        double t = 1.0;
        bool accepted = false;
        std::vector<double> trial;
        std::vector<double> rt;
        double mt = 0.0;
        for (int k = 0; k <= cfg.max_backtracks; ++k, t *= cfg.backtrack) {
            trial = axpy(x, t, p);
            try {
                rt = res.value(trial);
            } catch (const DomainError&) {
                continue;
            }
            clear_fixed(rt, fixed);
            mt = 0.5 * dot(rt, rt);
            if (std::isfinite(mt) && mt <= (1.0 - 2.0 * cfg.armijo * t) * m) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Full step accepted if it still shrinks the sup-norm (roundoff regime).
            trial = axpy(x, 1.0, p);
            rt = res.value(trial);
            clear_fixed(rt, fixed);
            if (!(sup_norm(rt) < rnorm)) throw NonConvergence("newton_root: line search failed", x, report);
            mt = 0.5 * dot(rt, rt);
        }
        x = std::move(trial);
        r = std::move(rt);
        m = mt;
        report.merit.push_back(m);
    }
}

}  // namespace hocqc
