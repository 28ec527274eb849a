#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hocqc {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square matrix whose nonzeros lie within a cyclic band |i - j| mod n <= b.
///
/// Periodic operators (lattice Hessians, finite element matrices on a ring)
/// fit this shape: an ordinary band plus corner blocks from the wrap.
/// Matrices too small for a proper band (2b + 1 > n) are stored densely.
class BandMatrix {
public:
    BandMatrix() = default;
    BandMatrix(std::size_t n, std::size_t half_bandwidth);

    /// Sums duplicate entries; the bandwidth is the largest cyclic distance found.
    static BandMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);

    std::size_t size() const noexcept { return n_; }
    std::size_t half_bandwidth() const noexcept { return b_; }
    bool dense() const noexcept { return dense_; }

    bool contains(std::size_t i, std::size_t j) const noexcept;
    double operator()(std::size_t i, std::size_t j) const noexcept;
    void add(std::size_t i, std::size_t j, double v);
    void set(std::size_t i, std::size_t j, double v);

    /// Clears row and column i and puts 1 on the diagonal.
    void pin(std::size_t i);
    void shift_diagonal(double tau);
    double max_abs_diagonal() const noexcept;
    /// A_ij *= s_i s_j.
    void scale_symmetric(std::span<const double> s);

    std::vector<double> multiply(std::span<const double> x) const;
    bool is_symmetric(double tol = 0.0) const;
    /// Largest |A_ij - B_ij| over the union of both patterns.
    double max_abs_difference(const BandMatrix& other) const;

private:
    std::size_t slot(std::size_t i, std::size_t j) const;
    long offset(std::size_t i, std::size_t j) const noexcept;

    std::size_t n_ = 0;
    std::size_t b_ = 0;
    bool dense_ = false;
    std::vector<double> data_;
};

enum class FactorPath { cholesky, lu };

struct LinearSolveInfo {
    FactorPath path = FactorPath::lu;
    bool bordered = false;
};

/// Solves A x = b with A symmetric positive definite. Returns nullopt when the
/// Cholesky factorization breaks down (A not positive definite).
std::optional<std::vector<double>> cholesky_solve(const BandMatrix& a, std::span<const double> rhs);

/// Solves A x = b by LU with partial pivoting. Throws NumericalError if singular.
std::vector<double> lu_solve(const BandMatrix& a, std::span<const double> rhs);

/// Cholesky when A is exactly symmetric and the factorization succeeds, LU otherwise.
/// The periodic corner blocks are handled by a bordered (Schur complement) solve.
std::vector<double> banded_solve(const BandMatrix& a, std::span<const double> rhs,
                                 LinearSolveInfo* info = nullptr);

/// Dense copy of A with row and column i removed.
BandMatrix without_index(const BandMatrix& a, std::size_t i);

/// Smallest eigenvalue lambda of A v = lambda B v with B symmetric positive definite.
/// Dense; meant for moderate sizes.
double smallest_generalized_eigenvalue(const BandMatrix& a, const BandMatrix& b);

}  // namespace hocqc
