#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hocqc/banded.hpp"
#include "hocqc/errors.hpp"

namespace hocqc {

struct NewtonConfig {
    double tol = 1e-10;         ///< sup-norm of the gradient/residual on free DOFs
    int max_iter = 50;
    double backtrack = 0.5;
    double armijo = 1e-4;
    int max_backtracks = 40;
    /// Threshold becomes tol * max(1, |r(x0)|_inf): large loads raise the roundoff floor.
    bool relative = true;

    void validate() const;
    double threshold(double initial_norm) const noexcept;
};

struct SolveReport {
    int iterations = 0;
    double final_residual_norm = 0.0;
    double energy = 0.0;        ///< objective value; 0 for root finding
    bool converged = false;
    double wall_time = 0.0;     ///< seconds
    std::vector<double> merit;  ///< objective (or ||r||^2 / 2) per accepted iterate
    FactorPath last_factor = FactorPath::lu;
    bool shifted = false;       ///< a diagonal shift retry was needed at some step
};

/// Raised when Newton exhausts max_iter or the line search stalls.
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, std::vector<double> best, SolveReport report)
        : NumericalError(what), best_(std::move(best)), report_(std::move(report)) {}
    const char* kind() const noexcept override { return "nonconvergence"; }
    const std::vector<double>& best_iterate() const noexcept { return best_; }
    const SolveReport& report() const noexcept { return report_; }

private:
    std::vector<double> best_;
    SolveReport report_;
};

struct Objective {
    std::function<double(std::span<const double>)> value;
    std::function<std::vector<double>(std::span<const double>)> gradient;
    std::function<BandMatrix(std::span<const double>)> hessian;
};

struct Residual {
    std::function<std::vector<double>(std::span<const double>)> value;
    std::function<BandMatrix(std::span<const double>)> jacobian;
};

/// Damped Newton for min E(x). Entries listed in `fixed` keep their x0 value.
std::vector<double> newton_minimize(const Objective& obj, std::vector<double> x0,
                                    std::span<const std::size_t> fixed, const NewtonConfig& cfg,
                                    SolveReport& report);

/// Damped Newton for r(x) = 0 on the free entries; backtracks on ||r||_2.
std::vector<double> newton_root(const Residual& res, std::vector<double> x0,
                                std::span<const std::size_t> fixed, const NewtonConfig& cfg,
                                SolveReport& report);

}  // namespace hocqc
