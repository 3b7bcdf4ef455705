#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hamlearn/cost.hpp"
#include "hamlearn/dataset.hpp"
#include "hamlearn/errors.hpp"
#include "hamlearn/hamiltonian.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

/// Momentum gradient descent settings. beta = 0 reduces the update to plain
/// gradient descent.
struct OptimizerConfig {
    double alpha = 0.05;     // learning rate
    double beta = 0.9;       // momentum decay, in [0,1)
    int max_iters = 20000;
    double cost_tol = 1e-10; // stop when total cost <= cost_tol
    double grad_tol = 1e-8;  // stop when ||gradient||_inf <= grad_tol
    double fd_step = 1e-5;
    double init_scale = 1.0;
    int restarts = 4;        // runs = restarts + 1
    std::uint64_t seed = 0;
    std::optional<StructureMask> mask;
    std::optional<HamiltonianParam> warm_start;
    int threads = 1;

    void check(std::size_t dim) const {
        if (!(alpha > 0.0)) throw contract_error("optimizer: alpha must be > 0");
        if (!(beta >= 0.0 && beta < 1.0)) throw contract_error("optimizer: beta must be in [0,1)");
        if (max_iters < 1) throw contract_error("optimizer: max_iters must be >= 1");
        if (cost_tol < 0.0 || grad_tol < 0.0)
            throw contract_error("optimizer: tolerances must be >= 0");
        if (!(fd_step > 0.0)) throw contract_error("optimizer: fd_step must be > 0");
        if (!(init_scale > 0.0)) throw contract_error("optimizer: init_scale must be > 0");
        if (restarts < 0) throw contract_error("optimizer: restarts must be >= 0");
        if (mask && mask->dim() != dim) throw contract_error("optimizer: mask dim mismatch");
        if (warm_start && warm_start->dim != dim)
            throw contract_error("optimizer: warm start dim mismatch");
    }
};

/// Mutable optimizer state: current weights W_t, velocity V_t, iteration
/// counter, the best cost seen so far in this run, and the (iter, cost)
/// trace.
struct OptimizerState {
    HamiltonianParam weights;
    std::vector<double> velocity;
    int iter = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> trace;

    static OptimizerState from_weights(HamiltonianParam w) {
        OptimizerState s;
        s.velocity.assign(w.weights.size(), 0.0);
        s.weights = std::move(w);
        return s;
    }
};

namespace detail {

/// The momentum update: V <- beta V + alpha g, W <- W - V.
inline void momentum_update(std::vector<double> &weights, std::vector<double> &velocity,
                            const std::vector<double> &gradient, double alpha, double beta) {
    for (std::size_t k = 0; k < weights.size(); ++k) {
        velocity[k] = beta * velocity[k] + alpha * gradient[k];
        weights[k] -= velocity[k];
    }
}

} // namespace detail

/// One descent step: evaluates the finite-difference gradient at the current
/// weights, applies the momentum update, re-applies the mask, and records the
/// new cost in the trace. Throws numeric_error naming the first weight that
/// becomes non-finite.
inline OptimizerState step(const OptimizerState &state, const std::vector<DataPair> &data,
                           const OptimizerConfig &cfg) {
    cfg.check(state.weights.dim);
    if (state.velocity.size() != state.weights.weights.size())
        throw contract_error("step: velocity length does not match weights");

    OptimizerState next = state;
    const Gradient g = gradient_fd(next.weights, data, cfg.fd_step,
                                   cfg.mask ? &*cfg.mask : nullptr, cfg.threads);
    detail::momentum_update(next.weights.weights, next.velocity, g.partials, cfg.alpha, cfg.beta);
    if (cfg.mask) next.weights = apply_mask(next.weights, *cfg.mask);
    next.iter = state.iter + 1;

    for (std::size_t k = 0; k < next.weights.weights.size(); ++k)
        if (!std::isfinite(next.weights.weights[k]))
            throw numeric_error("step: weight " + std::to_string(k) +
                                " became non-finite at iteration " + std::to_string(next.iter));

    const double c = cost(next.weights, data).total;
    next.best_cost = std::min(next.best_cost, c);
    next.trace.emplace_back(next.iter, c);
    return next;
}

namespace detail {

struct RunResult {
    HamiltonianParam best_weights;
    double best_cost = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::string status;
};

/// One full descent from the given start. Tracks the best iterate so the
/// reported weights never degrade when the raw cost oscillates. Stops on
/// cost_tol, grad_tol, max_iters, non-finite weights, or the divergence
/// guard (cost exceeding 10x its initial value).
inline RunResult run_descent(HamiltonianParam w, const std::vector<DataPair> &data,
                             const OptimizerConfig &cfg) {
    const StructureMask *mask = cfg.mask ? &*cfg.mask : nullptr;
    if (mask) w = apply_mask(w, *mask);

    RunResult res;
    res.best_weights = w;
    std::vector<double> velocity(w.weights.size(), 0.0);
    double initial_cost = -1.0;

    for (int iter = 0;; ++iter) {
        double c;
        try {
            c = cost(w, data).total;
        } catch (const numeric_error &) {
            res.status = "diverged";
            res.iterations = iter;
            return res;
        }
        if (iter == 0) initial_cost = c;
        if (c < res.best_cost) {
            res.best_cost = c;
            res.best_weights = w;
        }
        if (c <= cfg.cost_tol) {
            res.status = "cost_tol";
            res.iterations = iter;
            return res;
        }
        if (!std::isfinite(c) || c > 10.0 * initial_cost + 1e-300) {
            res.status = "diverged";
            res.iterations = iter;
            return res;
        }
        if (iter >= cfg.max_iters) {
            res.status = "max_iters";
            res.iterations = iter;
            return res;
        }

        const Gradient g = gradient_fd(w, data, cfg.fd_step, mask, cfg.threads);
        if (g.max_abs() <= cfg.grad_tol) {
            res.status = "grad_tol";
            res.iterations = iter;
            return res;
        }
        momentum_update(w.weights, velocity, g.partials, cfg.alpha, cfg.beta);
        if (mask) w = apply_mask(w, *mask);
        for (double x : w.weights)
            if (!std::isfinite(x)) {
                res.status = "diverged";
                res.iterations = iter + 1;
                return res;
            }
    }
}

} // namespace detail

/// Runs restarts + 1 independent descents (run 0 starts from warm_start when
/// provided, every other run from seeded uniform weights in
/// [-init_scale, init_scale]) and reports the best-cost run. reference, when
/// given, fills the raw and shift-aligned error fields of the report.
inline FitReport fit(const std::vector<DataPair> &data, std::size_t n, const OptimizerConfig &cfg,
                     const SymmetricMatrix *reference = nullptr) {
    if (data.empty()) throw contract_error("fit: data must be non-empty");
    cfg.check(n);
    if (reference && reference->dim() != n)
        throw contract_error("fit: reference dim does not match");

    const auto t0 = std::chrono::steady_clock::now();
    const int total_runs = cfg.restarts + 1;

    FitReport report;
    int best_run = -1;
    detail::RunResult best;
    for (int r = 0; r < total_runs; ++r) {
        const std::uint64_t run_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        HamiltonianParam w0 = (r == 0 && cfg.warm_start)
                                  ? *cfg.warm_start
                                  : random_hamiltonian(n, cfg.init_scale, run_seed);
        detail::RunResult res = detail::run_descent(std::move(w0), data, cfg);

        RunSummary summary;
        summary.index = r;
        summary.seed = run_seed;
        summary.final_cost = res.best_cost;
        summary.iterations = res.iterations;
        summary.status = res.status;
        report.runs.push_back(summary);

        const bool better = res.status != "diverged" &&
                            (best_run < 0 || best.status == "diverged" ||
                             res.best_cost < best.best_cost);
        if (best_run < 0 || better) {
            best = std::move(res);
            best_run = r;
        }
    }

    report.final_cost = best.best_cost;
    report.final_mean_cost = best.best_cost / static_cast<double>(data.size());
    report.iterations = best.iterations;
    report.learned = weights_to_matrix(best.best_weights);
    report.converged = best.status == "cost_tol" || best.status == "grad_tol";
    report.reason = best.status;
    if (reference) {
        report.reference_error = shift_aligned_error(*reference, report.learned);
        report.reference_error_raw = max_norm(to_complex(*reference - report.learned));
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace hamlearn
