#include "hocqc/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "hocqc/errors.hpp"

namespace hocqc {

BandMatrix::BandMatrix(std::size_t n, std::size_t half_bandwidth)
    : n_(n), b_(half_bandwidth), dense_(2 * half_bandwidth + 1 > n) {
    data_.assign(dense_ ? n * n : n * (2 * b_ + 1), 0.0);
}

BandMatrix BandMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
    std::size_t b = 0;
    for (const auto& t : entries) {
        const std::size_t d = t.row > t.col ? t.row - t.col : t.col - t.row;
        b = std::max(b, std::min(d, n - d));
    }
    BandMatrix m(n, b);
    for (const auto& t : entries) m.add(t.row, t.col, t.value);
    return m;
}

long BandMatrix::offset(std::size_t i, std::size_t j) const noexcept {
    const std::size_t d = (j + n_ - i) % n_;
    if (d <= b_) return static_cast<long>(d);
    if (n_ - d <= b_) return static_cast<long>(d) - static_cast<long>(n_);
    return static_cast<long>(n_);  // out of band
}

bool BandMatrix::contains(std::size_t i, std::size_t j) const noexcept {
    if (dense_) return true;
    return offset(i, j) != static_cast<long>(n_);
}

std::size_t BandMatrix::slot(std::size_t i, std::size_t j) const {
    if (dense_) return i * n_ + j;
    const long d = offset(i, j);
    if (d == static_cast<long>(n_)) {
        throw NumericalError("band matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") outside the band");
    }
    return i * (2 * b_ + 1) + static_cast<std::size_t>(d + static_cast<long>(b_));
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
    if (!contains(i, j)) return 0.0;
    return data_[slot(i, j)];
}

void BandMatrix::add(std::size_t i, std::size_t j, double v) { data_[slot(i, j)] += v; }
void BandMatrix::set(std::size_t i, std::size_t j, double v) { data_[slot(i, j)] = v; }

void BandMatrix::pin(std::size_t i) {
    for (std::size_t j = 0; j < n_; ++j) {
        if (!contains(i, j)) continue;
        set(i, j, 0.0);
        set(j, i, 0.0);
    }
    set(i, i, 1.0);
}

void BandMatrix::shift_diagonal(double tau) {
    for (std::size_t i = 0; i < n_; ++i) add(i, i, tau);
}

double BandMatrix::max_abs_diagonal() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) m = std::max(m, std::abs((*this)(i, i)));
    return m;
}

void BandMatrix::scale_symmetric(std::span<const double> s) {
    if (s.size() != n_) throw NumericalError("scale_symmetric: dimension mismatch");
    if (dense_) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) data_[i * n_ + j] *= s[i] * s[j];
        }
        return;
    }
    const long b = static_cast<long>(b_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (long d = -b; d <= b; ++d) {
            const std::size_t j = (i + static_cast<std::size_t>(d + static_cast<long>(n_))) % n_;
            data_[i * (2 * b_ + 1) + static_cast<std::size_t>(d + b)] *= s[i] * s[j];
        }
    }
}

std::vector<double> BandMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        if (dense_) {
            for (std::size_t j = 0; j < n_; ++j) s += data_[i * n_ + j] * x[j];
        } else {
            const long b = static_cast<long>(b_);
            for (long d = -b; d <= b; ++d) {
                const std::size_t j = (i + static_cast<std::size_t>(d + static_cast<long>(n_))) % n_;
                s += data_[i * (2 * b_ + 1) + static_cast<std::size_t>(d + b)] * x[j];
            }
        }
        y[i] = s;
    }
    return y;
}

bool BandMatrix::is_symmetric(double tol) const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (!contains(i, j)) continue;
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        }
    }
    return true;
}

double BandMatrix::max_abs_difference(const BandMatrix& other) const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (!contains(i, j) && !other.contains(i, j)) continue;
            m = std::max(m, std::abs((*this)(i, j) - other(i, j)));
        }
    }
    return m;
}

namespace {

std::vector<double> to_dense_colmajor(const BandMatrix& a) {
    const std::size_t n = a.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (a.contains(i, j)) d[j * n + i] = a(i, j);
        }
    }
    return d;
}

/// Returns nullopt only when `spd` and a Cholesky factorization breaks down.
std::optional<std::vector<double>> solve_impl(const BandMatrix& a, std::span<const double> rhs, bool spd,
                                              bool* bordered) {
    const std::size_t n = a.size();
    if (rhs.size() != n) throw NumericalError("linear solve: dimension mismatch");
    if (n == 0) return std::vector<double>{};
    const std::size_t b = a.half_bandwidth();
    const auto ln = static_cast<lapack_int>(n);

    if (a.dense() || n < 4 * b + 4) {
        if (bordered) *bordered = false;
        std::vector<double> m = to_dense_colmajor(a);
        std::vector<double> x(rhs.begin(), rhs.end());
        if (spd) {
            const lapack_int info = LAPACKE_dposv(LAPACK_COL_MAJOR, 'U', ln, 1, m.data(), ln, x.data(), ln);
            if (info > 0) return std::nullopt;
        } else {
            std::vector<lapack_int> ipiv(n);
            const lapack_int info =
                LAPACKE_dgesv(LAPACK_COL_MAJOR, ln, 1, m.data(), ln, ipiv.data(), x.data(), ln);
            if (info > 0) throw NumericalError("singular matrix in dense LU");
        }
        return x;
    }

    // Bordered solve: the leading k x k block is an ordinary band; the last
    // m = b unknowns carry every wrap-around coupling.
    if (bordered) *bordered = true;
    const std::size_t m = b;
    const std::size_t k = n - m;
    const auto lk = static_cast<lapack_int>(k);
    const auto lb = static_cast<lapack_int>(b);

    // Right-hand sides: columns 0..m-1 hold A(I, border), column m holds rhs_I.
    std::vector<double> r(k * (m + 1), 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t col = k + c;
        for (std::size_t i = 0; i < k; ++i) {
            if (a.contains(i, col)) r[c * k + i] = a(i, col);
        }
    }
    for (std::size_t i = 0; i < k; ++i) r[m * k + i] = rhs[i];

    std::vector<double> ab;
    std::vector<lapack_int> ipiv;
    if (spd) {
        const std::size_t ldab = b + 1;
        ab.assign(ldab * k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = j >= b ? j - b : 0; i <= j; ++i) ab[j * ldab + b + i - j] = a(i, j);
        }
        if (LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', lk, lb, ab.data(), static_cast<lapack_int>(ldab)) > 0) {
            return std::nullopt;
        }
        LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', lk, lb, static_cast<lapack_int>(m + 1), ab.data(),
                       static_cast<lapack_int>(ldab), r.data(), lk);
    } else {
        const std::size_t ldab = 3 * b + 1;
        ab.assign(ldab * k, 0.0);
        ipiv.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t lo = j >= b ? j - b : 0;
            const std::size_t hi = std::min(k - 1, j + b);
            for (std::size_t i = lo; i <= hi; ++i) ab[j * ldab + 2 * b + i - j] = a(i, j);
        }
        if (LAPACKE_dgbtrf(LAPACK_COL_MAJOR, lk, lk, lb, lb, ab.data(), static_cast<lapack_int>(ldab),
                           ipiv.data()) > 0) {
            throw NumericalError("singular matrix in banded LU");
        }
        LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', lk, lb, lb, static_cast<lapack_int>(m + 1), ab.data(),
                       static_cast<lapack_int>(ldab), ipiv.data(), r.data(), lk);
    }

    // Schur complement S = D - C Y and reduced right-hand side t = rhs_B - C z.
    std::vector<double> s(m * m, 0.0);
    std::vector<double> t(m);
    for (std::size_t rr = 0; rr < m; ++rr) {
        const std::size_t row = k + rr;
        for (std::size_t c = 0; c < m; ++c) s[c * m + rr] = a(row, k + c);
        t[rr] = rhs[row];
        const long bl = static_cast<long>(b);
        for (long d = -bl; d <= bl; ++d) {
            const std::size_t col = (row + n + static_cast<std::size_t>(d + static_cast<long>(n))) % n;
            if (col >= k) continue;
            const double cij = a(row, col);
            if (cij == 0.0) continue;
            for (std::size_t c = 0; c < m; ++c) s[c * m + rr] -= cij * r[c * k + col];
            t[rr] -= cij * r[m * k + col];
        }
    }
    const auto lm = static_cast<lapack_int>(m);
    if (spd) {
        if (LAPACKE_dposv(LAPACK_COL_MAJOR, 'U', lm, 1, s.data(), lm, t.data(), lm) > 0) return std::nullopt;
    } else {
        std::vector<lapack_int> sp(m);
        if (LAPACKE_dgesv(LAPACK_COL_MAJOR, lm, 1, s.data(), lm, sp.data(), t.data(), lm) > 0) {
            throw NumericalError("singular Schur complement in bordered solve");
        }
    }

    std::vector<double> x(n);
    for (std::size_t i = 0; i < k; ++i) {
        double v = r[m * k + i];
        for (std::size_t c = 0; c < m; ++c) v -= r[c * k + i] * t[c];
        x[i] = v;
    }
    for (std::size_t c = 0; c < m; ++c) x[k + c] = t[c];
    return x;
}

// Symmetric Jacobi equilibration: solves (S A S) y = S rhs, x = S y with
// S = |diag A|^{-1/2}. Mixed P1 / Hermite systems carry DOFs whose diagonal
// entries differ by many orders of magnitude near the blend endpoints.
std::optional<std::vector<double>> solve_scaled(const BandMatrix& a, std::span<const double> rhs, bool spd,
                                                bool* bordered) {
    const std::size_t n = a.size();
    if (rhs.size() != n) throw NumericalError("linear solve: dimension mismatch");
    std::vector<double> s(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(a(i, i));
        if (d > 0.0 && std::isfinite(d)) s[i] = 1.0 / std::sqrt(d);
    }
    BandMatrix scaled = a;
    scaled.scale_symmetric(s);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] * rhs[i];
    auto y = solve_impl(scaled, r, spd, bordered);
    if (!y) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) (*y)[i] *= s[i];
    return y;
}

}  // namespace

std::optional<std::vector<double>> cholesky_solve(const BandMatrix& a, std::span<const double> rhs) {
    return solve_scaled(a, rhs, true, nullptr);
}

std::vector<double> lu_solve(const BandMatrix& a, std::span<const double> rhs) {
    return *solve_scaled(a, rhs, false, nullptr);
}

std::vector<double> banded_solve(const BandMatrix& a, std::span<const double> rhs, LinearSolveInfo* info) {
    bool bordered = false;
    if (a.is_symmetric()) {
        if (auto x = solve_scaled(a, rhs, true, &bordered)) {
            if (info) *info = {FactorPath::cholesky, bordered};
            return *x;
        }
    }
    auto x = solve_scaled(a, rhs, false, &bordered);
    if (info) *info = {FactorPath::lu, bordered};
    return *x;
}

BandMatrix without_index(const BandMatrix& a, std::size_t drop) {
    const std::size_t n = a.size();
    BandMatrix r(n - 1, n - 1);
    for (std::size_t i = 0, ri = 0; i < n; ++i) {
        if (i == drop) continue;
        for (std::size_t j = 0, rj = 0; j < n; ++j) {
            if (j == drop) continue;
            if (a.contains(i, j)) r.set(ri, rj, a(i, j));
            ++rj;
        }
        ++ri;
    }
    return r;
}

double smallest_generalized_eigenvalue(const BandMatrix& a, const BandMatrix& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw NumericalError("generalized eigenproblem: dimension mismatch");
    std::vector<double> da = to_dense_colmajor(a);
    std::vector<double> db = to_dense_colmajor(b);
    std::vector<double> w(n);
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info = LAPACKE_dsygv(LAPACK_COL_MAJOR, 1, 'N', 'U', ln, da.data(), ln, db.data(), ln, w.data());
    if (info != 0) throw NumericalError("generalized eigen-solver failed (info " + std::to_string(info) + ")");
    return w.front();
}

}  // namespace hocqc
