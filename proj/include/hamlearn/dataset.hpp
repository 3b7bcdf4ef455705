#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hamlearn/errors.hpp"
#include "hamlearn/hamiltonian.hpp"
#include "hamlearn/linalg.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

/// One observation: a prepared input state, the measured (or exact) output
/// amplitude vector, and the evolution time.
struct DataPair {
    CVector psi;
    CVector phi;
    double t = 0.0;
};

/// How a row's input state was prepared. Indices are 1-based, matching the
/// state labels used in files and messages.
struct PreparedState {
    enum class Kind { Basis, Uniform, Pair, Amplitudes };

    Kind kind = Kind::Uniform;
    int index = 0; // Basis: the basis state, 1-based
    int i = 0, j = 0; // Pair: the two superposed basis states, 1-based, i < j
    CVector amplitudes; // Amplitudes: explicit state vector

    static PreparedState basis(int k) { return {Kind::Basis, k, 0, 0, {}}; }
    static PreparedState uniform() { return {Kind::Uniform, 0, 0, 0, {}}; }
    static PreparedState pair(int i, int j) { return {Kind::Pair, 0, i, j, {}}; }
    static PreparedState from_amplitudes(CVector v) {
        return {Kind::Amplitudes, 0, 0, 0, std::move(v)};
    }

    CVector to_vector(std::size_t dim) const {
        CVector v(dim, Complex(0.0, 0.0));
        switch (kind) {
        case Kind::Basis:
            if (index < 1 || static_cast<std::size_t>(index) > dim)
                throw data_error("prepared state: basis index " + std::to_string(index) +
                                 " out of range for dim " + std::to_string(dim));
            v[static_cast<std::size_t>(index - 1)] = 1.0;
            return v;
        case Kind::Uniform: {
            const double a = 1.0 / std::sqrt(static_cast<double>(dim));
            for (auto &x : v) x = a;
            return v;
        }
        case Kind::Pair: {
            if (i < 1 || j < 1 || i >= j || static_cast<std::size_t>(j) > dim)
                throw data_error("prepared state: pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") out of range for dim " +
                                 std::to_string(dim));
            const double a = 1.0 / std::sqrt(2.0);
            v[static_cast<std::size_t>(i - 1)] = a;
            v[static_cast<std::size_t>(j - 1)] = a;
            return v;
        }
        case Kind::Amplitudes:
            if (amplitudes.size() != dim)
                throw data_error("prepared state: amplitude length does not match dim");
            return amplitudes;
        }
        throw data_error("prepared state: unknown kind");
    }
};

/// One experiment row: prepared state, per-basis-state counts, shots, time.
/// Counts are integers when sampled; in exact mode they are real-valued
/// (probability * shots) and the row additionally carries the exact complex
/// output so no phase information is lost.
struct CountRow {
    PreparedState prepared;
    std::vector<double> counts;
    std::int64_t shots = 0;
    double t = 0.0;
    std::optional<CVector> exact_output;
};

struct CountTable {
    std::size_t dim = 0;
    std::vector<CountRow> rows;
};

/// Checks the count-table invariants; messages name the offending row
/// (1-based).
inline void validate(const CountTable &table) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const CountRow &row = table.rows[r];
        const std::string where = "count table row " + std::to_string(r + 1);
        if (row.counts.size() != table.dim)
            throw data_error(where + ": expected " + std::to_string(table.dim) +
                             " counts, got " + std::to_string(row.counts.size()));
        if (row.shots <= 0) throw data_error(where + ": shots must be positive");
        if (row.t < 0.0) throw data_error(where + ": negative evolution time");
        double sum = 0.0;
        for (double c : row.counts) {
            if (!(c >= 0.0)) throw data_error(where + ": negative count");
            sum += c;
        }
        const double shots = static_cast<double>(row.shots);
        if (std::abs(sum - shots) > 1e-6 * shots)
            throw data_error(where + ": counts sum to " + std::to_string(sum) +
                             " but shots = " + std::to_string(row.shots));
    }
}

/// The standard input-state design: the uniform superposition, the n basis
/// states, and the C(n,2) evenly split pairwise superpositions (e_i + e_j)/sqrt(2)
/// for i < j, in that fixed order. 1 + n + n(n-1)/2 states in total.
inline std::vector<PreparedState> standard_input_descriptors(std::size_t n) {
    if (n < 2) throw contract_error("standard_input_states: dim must be >= 2");
    std::vector<PreparedState> out;
    out.reserve(1 + n + n * (n - 1) / 2);
    out.push_back(PreparedState::uniform());
    for (std::size_t k = 1; k <= n; ++k) out.push_back(PreparedState::basis(static_cast<int>(k)));
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
            out.push_back(PreparedState::pair(static_cast<int>(i), static_cast<int>(j)));
    return out;
}

inline std::vector<CVector> standard_input_states(std::size_t n) {
    std::vector<CVector> out;
    for (const auto &d : standard_input_descriptors(n)) out.push_back(d.to_vector(n));
    return out;
}

/// Basis states plus the uniform superposition, in that order: the 1 + n row
/// layout of the worked hyperfine dataset.
inline std::vector<PreparedState> basis_plus_uniform_descriptors(std::size_t n) {
    std::vector<PreparedState> out;
    for (std::size_t k = 1; k <= n; ++k) out.push_back(PreparedState::basis(static_cast<int>(k)));
    out.push_back(PreparedState::uniform());
    return out;
}

/// Entry k = sqrt(counts[k] / shots): the non-negative real amplitude vector
/// of the empirical frequencies. Unit norm by construction.
inline CVector counts_to_amplitudes(const std::vector<double> &counts, std::int64_t shots) {
    if (shots <= 0) throw data_error("counts_to_amplitudes: shots must be positive");
    double sum = 0.0;
    for (double c : counts) {
        if (!(c >= 0.0)) throw data_error("counts_to_amplitudes: negative count");
        sum += c;
    }
    const double s = static_cast<double>(shots);
    if (std::abs(sum - s) > 1e-6 * s)
        throw data_error("counts_to_amplitudes: counts sum to " + std::to_string(sum) +
                         " but shots = " + std::to_string(shots));
    CVector v(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) v[k] = std::sqrt(counts[k] / s);
    return v;
}

/// Evolves psi under H for time t: expm_unitary(H, t) * psi.
inline CVector exact_output(const SymmetricMatrix &h, const CVector &psi, double t) {
    if (psi.size() != h.dim()) throw contract_error("exact_output: dimension mismatch");
    return expm_unitary(h, t) * psi;
}

inline std::vector<double> outcome_probabilities(const CVector &phi) {
    std::vector<double> p(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) p[k] = std::norm(phi[k]);
    return p;
}

namespace detail {

/// One multinomial draw per shot by inverse-CDF on our own uniform stream,
/// so sampled tables are identical across platforms and thread schedules.
inline std::vector<double> multinomial(const std::vector<double> &p, std::int64_t shots,
                                       SplitMix64 &rng) {
    std::vector<double> counts(p.size(), 0.0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform01();
        double acc = 0.0;
        std::size_t k = 0;
        for (; k + 1 < p.size(); ++k) {
            acc += p[k];
            if (u < acc) break;
        }
        counts[k] += 1.0;
    }
    return counts;
}

} // namespace detail

inline constexpr std::int64_t kExactModeShots = 1'000'000;

/// Simulates measurement of exact_output(H, psi, t) for each input.
///
/// With finite `shots`, draws one multinomial sample per input from the
/// outcome probabilities; row r uses the sub-seed derived from (seed, r).
/// With `shots` empty (exact mode), emits counts = probability * 10^6 at full
/// double precision and stores the exact complex output alongside, so
/// downstream consumers see the true amplitudes.
///
/// `noise` mixes in a depolarizing floor, p -> (1-eps) p + eps/n, before
/// sampling; it requires finite shots.
inline CountTable simulate_counts(const SymmetricMatrix &h,
                                  const std::vector<PreparedState> &inputs, double t,
                                  std::optional<std::int64_t> shots, std::uint64_t seed,
                                  double noise = 0.0) {
    if (noise < 0.0 || noise >= 1.0) throw contract_error("simulate_counts: noise must be in [0,1)");
    if (noise > 0.0 && !shots.has_value())
        throw contract_error("simulate_counts: depolarizing noise requires finite shots");
    if (shots.has_value() && *shots <= 0)
        throw contract_error("simulate_counts: shots must be positive");

    const std::size_t n = h.dim();
    const EigenDecomposition eig = symmetric_eigendecompose(h);
    const ComplexMatrix u = expm_unitary(eig, t);

    CountTable table;
    table.dim = n;
    table.rows.reserve(inputs.size());
    for (std::size_t r = 0; r < inputs.size(); ++r) {
        const CVector psi = inputs[r].to_vector(n);
        if (std::abs(norm2(psi) - 1.0) > 1e-9)
            throw contract_error("simulate_counts: input " + std::to_string(r + 1) +
                                 " is not normalized");
        const CVector phi = u * psi;
        std::vector<double> p = outcome_probabilities(phi);

        CountRow row;
        row.prepared = inputs[r];
        row.t = t;
        if (shots.has_value()) {
            if (noise > 0.0)
                for (double &pk : p) pk = (1.0 - noise) * pk + noise / static_cast<double>(n);
            SplitMix64 rng(derive_seed(seed, r));
            row.shots = *shots;
            row.counts = detail::multinomial(p, *shots, rng);
        } else {
            row.shots = kExactModeShots;
            row.counts.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                row.counts[k] = p[k] * static_cast<double>(kExactModeShots);
            row.exact_output = phi;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CountTable simulate_counts(const SymmetricMatrix &h, const std::vector<CVector> &inputs,
                                  double t, std::optional<std::int64_t> shots, std::uint64_t seed,
                                  double noise = 0.0) {
    std::vector<PreparedState> descriptors;
    descriptors.reserve(inputs.size());
    for (const auto &v : inputs) descriptors.push_back(PreparedState::from_amplitudes(v));
    return simulate_counts(h, descriptors, t, shots, seed, noise);
}

/// One DataPair per row: psi from the prepared-state descriptor, phi from
/// the row's exact output when present (exact mode keeps the phases) or
/// from the count frequencies otherwise, t from the row.
inline std::vector<DataPair> pairs_from_table(const CountTable &table) {
    validate(table);
    std::vector<DataPair> pairs;
    pairs.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const CountRow &row = table.rows[r];
        DataPair pair;
        try {
            pair.psi = row.prepared.to_vector(table.dim);
        } catch (const data_error &e) {
            throw data_error("count table row " + std::to_string(r + 1) + ": " + e.what());
        }
        pair.phi = row.exact_output ? *row.exact_output
                                    : counts_to_amplitudes(row.counts, row.shots);
        pair.t = row.t;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

/// Exact data pairs straight from the black-box Hamiltonian, no count table
/// in between: phi = e^{-itH} psi with phases intact.
inline std::vector<DataPair> exact_pairs(const SymmetricMatrix &h,
                                         const std::vector<CVector> &inputs, double t) {
    const EigenDecomposition eig = symmetric_eigendecompose(h);
    const ComplexMatrix u = expm_unitary(eig, t);
    std::vector<DataPair> out;
    out.reserve(inputs.size());
    for (const auto &psi : inputs) out.push_back(DataPair{psi, u * psi, t});
    return out;
}

} // namespace hamlearn
