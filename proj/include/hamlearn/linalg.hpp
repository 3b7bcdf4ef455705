#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "hamlearn/errors.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

inline double norm2(const CVector &v) {
    double s = 0.0;
    for (const auto &x : v) s += std::norm(x);
    return std::sqrt(s);
}

/// Conjugate-linear in the bra: sum_k conj(bra_k) * ket_k.
inline Complex inner_product(const CVector &bra, const CVector &ket) {
    if (bra.size() != ket.size())
        throw contract_error("inner_product: dimension mismatch (" + std::to_string(bra.size()) +
                             " vs " + std::to_string(ket.size()) + ")");
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < bra.size(); ++k) acc += std::conj(bra[k]) * ket[k];
    return acc;
}

/// Dense row-major real matrix.
class RealMatrix {
  public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static RealMatrix identity(std::size_t n) {
        RealMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<double> &data() const { return a_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Dense row-major complex matrix.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, Complex fill = Complex(0.0, 0.0))
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1.0, 0.0);
        return m;
    }

    Complex &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Complex &operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<Complex> &data() const { return a_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> a_;
};

inline ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows()) throw contract_error("matrix product: inner dimensions differ");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline ComplexMatrix operator-(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw contract_error("matrix difference: shape mismatch");
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline ComplexMatrix adjoint(const ComplexMatrix &a) {
    ComplexMatrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

inline CVector operator*(const ComplexMatrix &a, const CVector &v) {
    if (a.cols() != v.size()) throw contract_error("matrix-vector product: dimension mismatch");
    CVector out(a.rows(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

/// Real symmetric matrix. Symmetry holds exactly because both triangles are
/// written together; there is no unchecked mutable access.
class SymmetricMatrix {
  public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    /// Builds from row-major entries; the upper triangle wins and is mirrored.
    SymmetricMatrix(std::size_t n, const std::vector<double> &row_major) : n_(n), a_(n * n) {
        if (row_major.size() != n * n)
            throw contract_error("SymmetricMatrix: entry count does not match dim");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                a_[i * n + j] = row_major[i * n + j];
                a_[j * n + i] = row_major[i * n + j];
            }
    }

    static SymmetricMatrix diagonal(const std::vector<double> &d) {
        SymmetricMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
        return m;
    }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }
    std::size_t dim() const { return n_; }

    double max_abs_entry() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double x : a_) s += x * x;
        return std::sqrt(s);
    }

    bool is_finite() const {
        return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
    }

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

inline SymmetricMatrix operator-(const SymmetricMatrix &a, const SymmetricMatrix &b) {
    if (a.dim() != b.dim()) throw contract_error("symmetric difference: dim mismatch");
    SymmetricMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) c.set(i, j, a(i, j) - b(i, j));
    return c;
}

inline SymmetricMatrix operator+(const SymmetricMatrix &a, const SymmetricMatrix &b) {
    if (a.dim() != b.dim()) throw contract_error("symmetric sum: dim mismatch");
    SymmetricMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) c.set(i, j, a(i, j) + b(i, j));
    return c;
}

/// a + f*I
inline SymmetricMatrix shifted(const SymmetricMatrix &a, double f) {
    SymmetricMatrix c = a;
    for (std::size_t i = 0; i < a.dim(); ++i) c.set(i, i, a(i, i) + f);
    return c;
}

inline ComplexMatrix to_complex(const SymmetricMatrix &a) {
    ComplexMatrix c(a.dim(), a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) c(i, j) = Complex(a(i, j), 0.0);
    return c;
}

inline ComplexMatrix to_complex(const RealMatrix &a) {
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = Complex(a(i, j), 0.0);
    return c;
}

/// H = U diag(eigenvalues) U^T with eigenvalues ascending and U orthogonal;
/// column k of U pairs with eigenvalues[k].
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    RealMatrix eigenvectors;
};

namespace detail {

inline double offdiag_frobenius(const RealMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

} // namespace detail

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver for real symmetric matrices. Sweeps the strict
/// upper triangle in row-major order. Normally drives the off-diagonal
/// Frobenius norm to machine-epsilon level (the evolution operator built on
/// top inherits t times the residual, so stopping early is visible
/// downstream); a sweep that makes no further progress may stop once the
/// residual is below 1e-12 * (1 + ||H||_F). Deterministic for identical
/// input.
inline EigenDecomposition symmetric_eigendecompose(const SymmetricMatrix &h) {
    const std::size_t n = h.dim();
    if (n == 0) throw contract_error("symmetric_eigendecompose: empty matrix");
    if (!h.is_finite()) throw contract_error("symmetric_eigendecompose: non-finite entry");

    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = h(i, j);
    RealMatrix v = RealMatrix::identity(n);

    const double eps = std::numeric_limits<double>::epsilon();
    const double target = eps * (1.0 + h.frobenius());
    const double acceptable = 1e-12 * (1.0 + h.frobenius());
    double off = detail::offdiag_frobenius(a);
    int sweep = 0;
    while (off > target) {
        if (sweep++ >= kJacobiMaxSweeps) {
            if (off <= acceptable) break;
            throw numeric_error("symmetric_eigendecompose: no convergence after " +
                                    std::to_string(kJacobiMaxSweeps) + " sweeps",
                                off);
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e154) {
                    t = 0.5 / theta; // avoids theta^2 overflow
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(p, k) = a(k, p);
                    a(k, q) = s * akp + c * akq;
                    a(q, k) = a(k, q);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        const double off_after = detail::offdiag_frobenius(a);
        if (off_after >= off && off_after <= acceptable) {
            off = off_after; // stagnated within tolerance
            break;
        }
        off = off_after;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = RealMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

/// e^{-i t H} assembled from the eigendecomposition as
/// U diag(e^{-i t lambda_k}) U^T. Unitary by construction.
inline ComplexMatrix expm_unitary(const EigenDecomposition &eig, double t) {
    const std::size_t n = eig.eigenvalues.size();
    std::vector<Complex> phase(n);
    for (std::size_t k = 0; k < n; ++k)
        phase[k] = std::exp(Complex(0.0, -t * eig.eigenvalues[k]));
    const RealMatrix &u = eig.eigenvectors;
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) acc += u(i, k) * phase[k] * u(j, k);
            m(i, j) = acc;
        }
    return m;
}

inline ComplexMatrix expm_unitary(const SymmetricMatrix &h, double t) {
    return expm_unitary(symmetric_eigendecompose(h), t);
}

/// Partial sum of the exponential series for e^{-i t H}, `terms` terms
/// starting at the identity. Reference oracle only; the caller is responsible
/// for keeping ||tH|| small enough that the series converges numerically
/// (see expm_taylor_scaled).
inline ComplexMatrix expm_taylor(const SymmetricMatrix &h, double t, int terms) {
    if (terms < 1) throw contract_error("expm_taylor: terms must be >= 1");
    const std::size_t n = h.dim();
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(0.0, -t * h(i, j));
    ComplexMatrix sum = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k < terms; ++k) {
        term = term * a;
        const double inv = 1.0 / static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                term(i, j) *= inv;
                const Complex x = term(i, j);
                if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                    throw numeric_error("expm_taylor: series overflow at term " +
                                        std::to_string(k));
                sum(i, j) += x;
            }
    }
    return sum;
}

/// Scaling-and-squaring wrapper around expm_taylor: scales by 2^k so that
/// ||tH/2^k||_F <= 0.5, then squares k times.
inline ComplexMatrix expm_taylor_scaled(const SymmetricMatrix &h, double t, int terms = 30) {
    int k = 0;
    double scale = std::abs(t) * h.frobenius();
    while (scale > 0.5 && k < 64) {
        scale *= 0.5;
        ++k;
    }
    ComplexMatrix m = expm_taylor(h, t / std::pow(2.0, k), terms);
    for (int s = 0; s < k; ++s) m = m * m;
    return m;
}

inline constexpr int kPowerIterationCap = 1000;

/// Induced 2-norm: the largest singular value, computed by power iteration on
/// A^dagger A. Deterministic start vector; monotone under scaling.
inline double max_norm(const ComplexMatrix &a) {
    const std::size_t rows = a.rows(), cols = a.cols();
    if (rows == 0 || cols == 0) return 0.0;

    SplitMix64 rng(0x6d61786e6f726dULL);
    CVector v(cols);
    for (auto &x : v) x = Complex(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    const double nv = norm2(v);
    for (auto &x : v) x /= nv;

    double sigma2 = 0.0;
    int stable = 0;
    for (int iter = 0; iter < kPowerIterationCap; ++iter) {
        // w = A v, z = A^dagger w; Rayleigh quotient of A^dagger A is ||w||^2.
        CVector w(rows, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < rows; ++i) {
            Complex acc(0.0, 0.0);
            for (std::size_t j = 0; j < cols; ++j) acc += a(i, j) * v[j];
            w[i] = acc;
        }
        double s2 = 0.0;
        for (const auto &x : w) s2 += std::norm(x);
        CVector z(cols, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < rows; ++i) {
            const Complex wi = w[i];
            for (std::size_t j = 0; j < cols; ++j) z[j] += std::conj(a(i, j)) * wi;
        }
        const double nz = norm2(z);
        if (nz == 0.0) return std::sqrt(s2);
        for (auto &x : z) x /= nz;
        v = std::move(z);
        if (std::abs(s2 - sigma2) <= 1e-15 * s2) {
            if (++stable >= 2) {
                sigma2 = s2;
                break;
            }
        } else {
            stable = 0;
        }
        sigma2 = s2;
    }
    return std::sqrt(sigma2);
}

inline double max_norm(const SymmetricMatrix &a) { return max_norm(to_complex(a)); }
inline double max_norm(const RealMatrix &a) { return max_norm(to_complex(a)); }

} // namespace hamlearn
