#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamlearn/errors.hpp"
#include "hamlearn/linalg.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

/// Number of free weights of a real symmetric n x n matrix: n(n+1)/2.
inline std::size_t weight_count(std::size_t n) { return n * (n + 1) / 2; }

/// Packed index of weight (i, j), 0-based, i <= j, row-major upper-triangular
/// order: (0,0), (0,1), ..., (0,n-1), (1,1), ..., (n-1,n-1).
inline std::size_t weight_index(std::size_t n, std::size_t i, std::size_t j) {
    return i * n - i * (i - 1) / 2 + (j - i);
}

/// Packed view of a real symmetric Hamiltonian: dim plus the n(n+1)/2 upper
/// triangular weights in row-major order.
struct HamiltonianParam {
    std::size_t dim = 0;
    std::vector<double> weights;

    HamiltonianParam() = default;
    HamiltonianParam(std::size_t n, std::vector<double> w) : dim(n), weights(std::move(w)) {
        if (weights.size() != weight_count(dim))
            throw contract_error("HamiltonianParam: expected " +
                                 std::to_string(weight_count(dim)) + " weights, got " +
                                 std::to_string(weights.size()));
    }

    static HamiltonianParam zeros(std::size_t n) {
        return HamiltonianParam(n, std::vector<double>(weight_count(n), 0.0));
    }

    double &at(std::size_t i, std::size_t j) { return weights[weight_index(dim, i, j)]; }
    double at(std::size_t i, std::size_t j) const { return weights[weight_index(dim, i, j)]; }

    bool operator==(const HamiltonianParam &other) const = default;
};

/// Unpacks weights into the full symmetric matrix. Exact: no arithmetic.
inline SymmetricMatrix weights_to_matrix(const HamiltonianParam &p) {
    if (p.weights.size() != weight_count(p.dim))
        throw contract_error("weights_to_matrix: weight count does not match dim");
    SymmetricMatrix m(p.dim);
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.dim; ++i)
        for (std::size_t j = i; j < p.dim; ++j) m.set(i, j, p.weights[k++]);
    return m;
}

/// Exact inverse of weights_to_matrix.
inline HamiltonianParam matrix_to_weights(const SymmetricMatrix &m) {
    HamiltonianParam p;
    p.dim = m.dim();
    p.weights.reserve(weight_count(p.dim));
    for (std::size_t i = 0; i < p.dim; ++i)
        for (std::size_t j = i; j < p.dim; ++j) p.weights.push_back(m(i, j));
    return p;
}

/// Sparsity pattern over the packed weights: entries outside `allowed` are
/// pinned to exactly zero. Encodes domain knowledge such as conservation-law
/// block structure.
class StructureMask {
  public:
    StructureMask() = default;
    explicit StructureMask(std::size_t n, bool all_allowed = false)
        : dim_(n), allowed_(weight_count(n), all_allowed ? 1 : 0) {}

    static StructureMask full(std::size_t n) { return StructureMask(n, true); }
    static StructureMask empty(std::size_t n) { return StructureMask(n, false); }

    /// Builds from 0-based (i, j) pairs with i <= j.
    static StructureMask from_pairs(std::size_t n,
                                    const std::vector<std::pair<std::size_t, std::size_t>> &pairs) {
        StructureMask m(n);
        for (const auto &[i, j] : pairs) {
            if (i > j || j >= n) throw contract_error("StructureMask: pair out of range");
            m.allowed_[weight_index(n, i, j)] = 1;
        }
        return m;
    }

    void allow(std::size_t i, std::size_t j) {
        if (i > j || j >= dim_) throw contract_error("StructureMask: pair out of range");
        allowed_[weight_index(dim_, i, j)] = 1;
    }

    bool allows(std::size_t packed_index) const { return allowed_[packed_index] != 0; }
    bool allows(std::size_t i, std::size_t j) const {
        return allowed_[weight_index(dim_, i, j)] != 0;
    }
    std::size_t dim() const { return dim_; }

    /// 0-based (i, j) pairs currently allowed, in packed order.
    std::vector<std::pair<std::size_t, std::size_t>> allowed_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i; j < dim_; ++j)
                if (allows(i, j)) out.emplace_back(i, j);
        return out;
    }

    bool operator==(const StructureMask &other) const = default;

  private:
    std::size_t dim_ = 0;
    std::vector<char> allowed_;
};

/// Zeroes exactly the weights outside the mask; idempotent.
inline HamiltonianParam apply_mask(const HamiltonianParam &p, const StructureMask &mask) {
    if (mask.dim() != p.dim) throw contract_error("apply_mask: mask dim does not match weights");
    HamiltonianParam out = p;
    for (std::size_t k = 0; k < out.weights.size(); ++k)
        if (!mask.allows(k)) out.weights[k] = 0.0;
    return out;
}

/// Each weight i.i.d. uniform in [-scale, scale); deterministic per seed.
inline HamiltonianParam random_hamiltonian(std::size_t n, double scale, std::uint64_t seed) {
    if (n < 1) throw contract_error("random_hamiltonian: dim must be >= 1");
    if (!(scale > 0.0)) throw contract_error("random_hamiltonian: scale must be > 0");
    SplitMix64 rng(seed);
    HamiltonianParam p = HamiltonianParam::zeros(n);
    for (auto &w : p.weights) w = rng.uniform_symmetric(scale);
    return p;
}

struct ShiftAlignment {
    double f_star = 0.0; // the aligning diagonal shift
    double error = 0.0;  // min_f max_norm(A - B - f I)
};

/// Minimizes max_norm(A - B - f I) over real f by golden-section search.
/// The objective equals max_k |mu_k - f| for the eigenvalues mu of A - B,
/// which is convex, so the search over [mu_min - 1, mu_max + 1] converges to
/// the global minimum. Tolerance 1e-12 on f.
inline ShiftAlignment shift_alignment(const SymmetricMatrix &a, const SymmetricMatrix &b) {
    if (a.dim() != b.dim()) throw contract_error("shift_alignment: dim mismatch");
    const EigenDecomposition eig = symmetric_eigendecompose(a - b);
    const std::vector<double> &mu = eig.eigenvalues;
    const auto objective = [&mu](double f) {
        double m = 0.0;
        for (double x : mu) m = std::max(m, std::abs(x - f));
        return m;
    };

    double lo = mu.front() - 1.0, hi = mu.back() + 1.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > 1e-12) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double f_star = 0.5 * (lo + hi);
    return ShiftAlignment{f_star, objective(f_star)};
}

/// The physically meaningful distance between Hamiltonians: the max norm of
/// A - B after removing the best diagonal shift. Zero exactly on the
/// equivalence classes {B + f I}.
inline double shift_aligned_error(const SymmetricMatrix &a, const SymmetricMatrix &b) {
    return shift_alignment(a, b).error;
}

/// Per-restart outcome recorded by the optimizer.
struct RunSummary {
    int index = 0;
    std::uint64_t seed = 0;
    double final_cost = 0.0;
    int iterations = 0;
    std::string status; // "cost_tol" | "grad_tol" | "max_iters" | "diverged"
};

/// Result of a fit: the best run's learned matrix plus convergence metadata.
/// reference_error fields are present only when the caller supplied a known
/// true Hamiltonian to compare against.
struct FitReport {
    double final_cost = 0.0; // sum over pairs
    double final_mean_cost = 0.0;
    int iterations = 0;
    SymmetricMatrix learned;
    std::optional<double> reference_error;     // shift-aligned max norm
    std::optional<double> reference_error_raw; // plain max norm, no alignment
    double wall_time_s = 0.0;
    bool converged = false;
    std::string reason;
    std::vector<RunSummary> runs;
};

} // namespace hamlearn
