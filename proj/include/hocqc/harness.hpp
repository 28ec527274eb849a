#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hocqc/coupling.hpp"

namespace hocqc {

enum class ErrorRegion { all, atomistic, blend, continuum };

const char* region_label(ErrorRegion r) noexcept;

struct StrainError {
    double absolute = 0.0;
    double relative = 0.0;
};

/// Reference interpolant of u_ref: Q for lattice solutions, Pi on the solution's
/// space for unit meshes, Pi on the canonical space of `dd` for coarse meshes.
MixedFEFunction reference_field(const LatticeSystem& sys, const DomainDecomposition& dd,
                                const LatticeFunction& u_ref, const CoupledSolution& sol);

/// ||grad(ref) - grad(u_m)|| over `region`; relative to ||grad(ref)|| on the whole period.
StrainError strain_error(const LatticeSystem& sys, const DomainDecomposition& dd, const LatticeFunction& u_ref,
                         const CoupledSolution& sol, ErrorRegion region = ErrorRegion::all,
                         const QuadratureRule& rule = QuadratureRule());

struct HocIndicator {
    /// ||u5||, ||u2 u4||, ||u3 u2^2||, ||u3||_4^2 ||u2||_8^4, ||f'''||.
    std::array<double, 5> terms{};
    double total = 0.0;
};

/// err^hoc of u over the elements in `region` (all elements by default).
HocIndicator error_indicator_hoc(const LatticeSystem& sys, const MixedFEFunction& u, const ExternalLoad& load,
                                 const std::optional<DomainDecomposition>& dd = std::nullopt,
                                 ErrorRegion region = ErrorRegion::all,
                                 const QuadratureRule& rule = QuadratureRule());

struct ExperimentConfig {
    std::vector<Method> methods{Method::bqce, Method::bqcf, Method::bqhoce, Method::bqhocf};
    std::vector<long> half_counts{50, 100, 200, 400, 800};
    std::string potential = "harmonic";
    std::vector<int> range{1, 2};
    double macro_strain = 1.0;
    double f_scale = 20.0;
    LoadKind load = LoadKind::singular;
    int load_mode = 2;              ///< wave number of the smooth load
    double decomposition_fraction = 0.125;  ///< L_a = L_b = round(c 2N)
    std::optional<long> la;         ///< fixed L_a overrides the fraction
    std::optional<long> lb;
    ErrorRegion region = ErrorRegion::all;
    std::vector<double> h_list;     ///< coarsening study only
    NewtonConfig newton;
    CouplingOptions coupling;

    void validate() const;
    LatticeSystem system(long half_count) const;
    ExternalLoad external_load() const;
    DomainDecomposition decomposition(const LatticeSystem& sys) const;
};

PairPotential make_potential(const std::string& name);

struct ConvergenceRecord {
    Method method = Method::atomistic;
    double resolution = 0.0;  ///< eps = 1/(2N) or h
    long half_count = 0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
};

/// Least squares on (log x, log y); nonpositive y are dropped with a warning.
SlopeFit fit_slope(std::span<const double> x, std::span<const double> y, std::vector<std::string>* warnings = nullptr);
SlopeFit fit_slope(std::span<const ConvergenceRecord> records, std::vector<std::string>* warnings = nullptr);

struct StudyResult {
    std::vector<ConvergenceRecord> records;
    std::map<Method, SlopeFit> slopes;
    std::map<Method, std::string> failures;  ///< methods whose series stopped early
    std::vector<std::string> warnings;
    bool partial() const noexcept { return !failures.empty(); }
    std::vector<ConvergenceRecord> series(Method m) const;
};

StudyResult run_convergence_study(const ExperimentConfig& cfg);
/// B-QHOCE on the first half count for every h in h_list; errors on the requested region.
StudyResult run_coarsening_study(const ExperimentConfig& cfg);

void write_records_csv(const std::string& path, std::span<const ConvergenceRecord> records);
std::vector<ConvergenceRecord> read_records_csv(const std::string& path);

/// Columns x, strain_atomistic, strain_<method>...; one row per unit element midpoint.
void dump_strain_profile(const LatticeSystem& sys, const DomainDecomposition& dd, const LatticeFunction& u_ref,
                         std::span<const CoupledSolution> solutions, const std::string& path);

}  // namespace hocqc
