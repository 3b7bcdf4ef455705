#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "hamlearn/dataset.hpp"
#include "hamlearn/errors.hpp"
#include "hamlearn/hamiltonian.hpp"
#include "hamlearn/linalg.hpp"

namespace hamlearn {

/// Infidelity cost over a dataset. total is the sum of the per-pair terms
/// 1 - |<phi| e^{-itH} |psi>|^2; mean() is total divided by the pair count,
/// the normalization used when quoting a single cost figure for a dataset.
struct CostValue {
    double total = 0.0;
    std::vector<double> per_pair;

    double mean() const {
        return per_pair.empty() ? 0.0 : total / static_cast<double>(per_pair.size());
    }
};

namespace detail {

/// Per-pair fidelity through the shared eigendecomposition:
/// <phi|U e^{-itD} U^T|psi> = conj(U^T phi) . (e^{-itD} (U^T psi)).
inline double infidelity(const EigenDecomposition &eig, const std::vector<Complex> &phase,
                         const CVector &psi, const CVector &phi) {
    const RealMatrix &u = eig.eigenvectors;
    const std::size_t n = eig.eigenvalues.size();
    Complex overlap(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        Complex a(0.0, 0.0), b(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            a += u(i, k) * psi[i];
            b += u(i, k) * phi[i];
        }
        overlap += std::conj(b) * phase[k] * a;
    }
    return 1.0 - std::norm(overlap);
}

} // namespace detail

/// Evaluates the cost of the candidate weights against the data. One
/// eigendecomposition per call; the evolution phases are shared across all
/// pairs with the same t. Per-pair terms are clamped to [0,1]: values below
/// -1e-12 indicate a broken unitary and raise numeric_error.
inline CostValue cost(const HamiltonianParam &p, const std::vector<DataPair> &data) {
    if (data.empty()) throw contract_error("cost: data must be non-empty");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data[i].psi.size() != p.dim || data[i].phi.size() != p.dim)
            throw contract_error("cost: pair " + std::to_string(i + 1) +
                                 " dimension does not match weights (dim " +
                                 std::to_string(p.dim) + ")");

    const EigenDecomposition eig = symmetric_eigendecompose(weights_to_matrix(p));
    const std::size_t n = p.dim;

    std::map<double, std::vector<Complex>> phases_by_t;
    for (const DataPair &pair : data) {
        auto [it, inserted] = phases_by_t.try_emplace(pair.t);
        if (inserted) {
            it->second.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                it->second[k] = std::exp(Complex(0.0, -pair.t * eig.eigenvalues[k]));
        }
    }

    CostValue out;
    out.per_pair.reserve(data.size());
    for (const DataPair &pair : data) {
        double term = detail::infidelity(eig, phases_by_t.at(pair.t), pair.psi, pair.phi);
        if (term < 0.0) {
            if (term < -1e-12)
                throw numeric_error("cost: per-pair term " + std::to_string(term) +
                                        " below -1e-12; evolution operator is not unitary",
                                    -term);
            term = 0.0;
        }
        out.per_pair.push_back(term);
        out.total += term;
    }
    return out;
}

/// Central finite-difference gradient of the cost with respect to each packed
/// weight. Length n(n+1)/2, same ordering as HamiltonianParam.weights; step
/// records the h used.
struct Gradient {
    std::vector<double> partials;
    double step = 0.0;

    double max_abs() const {
        double m = 0.0;
        for (double g : partials) m = std::max(m, std::abs(g));
        return m;
    }
};

/// partials[k] = (cost(p + h e_k) - cost(p - h e_k)) / (2h). Masked-out
/// partials are forced to zero and their evaluations skipped. Each partial is
/// independent, so the work is split across `threads`; every partial lands in
/// its own slot and totals inside one evaluation are summed in pair order, so
/// the result is bit-identical for any thread count.
inline Gradient gradient_fd(const HamiltonianParam &p, const std::vector<DataPair> &data,
                            double h, const StructureMask *mask = nullptr, int threads = 1) {
    if (!(h > 0.0)) throw contract_error("gradient_fd: step must be > 0");
    if (mask && mask->dim() != p.dim)
        throw contract_error("gradient_fd: mask dim does not match weights");

    const std::size_t nw = p.weights.size();
    Gradient g;
    g.step = h;
    g.partials.assign(nw, 0.0);

    const auto partial_at = [&](std::size_t k) {
        HamiltonianParam shifted_p = p;
        shifted_p.weights[k] = p.weights[k] + h;
        const double up = cost(shifted_p, data).total;
        shifted_p.weights[k] = p.weights[k] - h;
        const double down = cost(shifted_p, data).total;
        return (up - down) / (2.0 * h);
    };

    if (threads <= 1) {
        for (std::size_t k = 0; k < nw; ++k)
            if (!mask || mask->allows(k)) g.partials[k] = partial_at(k);
        return g;
    }

    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), nw);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t k = w; k < nw; k += nthreads)
                    if (!mask || mask->allows(k)) g.partials[k] = partial_at(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto &th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return g;
}

} // namespace hamlearn
