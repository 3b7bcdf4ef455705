#pragma once

#include <cstdint>
#include <vector>

#include "hamlearn/hamlearn.hpp"

namespace hamlearn::testing {

inline SymmetricMatrix random_symmetric(std::size_t n, double scale, std::uint64_t seed) {
    return weights_to_matrix(random_hamiltonian(n, scale, seed));
}

inline double max_entry_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline CVector basis_state(std::size_t n, std::size_t k) {
    CVector v(n, Complex(0.0, 0.0));
    v[k] = Complex(1.0, 0.0);
    return v;
}

/// The worked 4-state hyperfine Hamiltonian: blocks [1], [[-1,2],[2,-1]], [1].
inline HamiltonianParam hyperfine_weights() {
    return HamiltonianParam(4, {1, 0, 0, 0, -1, 2, 0, -1, 0, 1});
}

inline SymmetricMatrix hyperfine_matrix() { return weights_to_matrix(hyperfine_weights()); }

/// The measured hyperfine counts: four basis-state rows plus the uniform
/// superposition, 1024 shots each, evolved for t = 0.785.
inline CountTable hyperfine_table() {
    const std::vector<std::vector<double>> counts = {{993, 12, 8, 11},
                                                     {34, 13, 959, 18},
                                                     {17, 982, 14, 11},
                                                     {10, 34, 47, 933},
                                                     {240, 249, 255, 280}};
    CountTable table;
    table.dim = 4;
    for (int r = 0; r < 4; ++r)
        table.rows.push_back(CountRow{PreparedState::basis(r + 1), counts[r], 1024, 0.785, {}});
    table.rows.push_back(CountRow{PreparedState::uniform(), counts[4], 1024, 0.785, {}});
    return table;
}

/// Conservation-of-spin sparsity pattern for the hyperfine system.
inline StructureMask hyperfine_mask() {
    return StructureMask::from_pairs(4, {{0, 0}, {1, 1}, {1, 2}, {2, 2}, {3, 3}});
}

} // namespace hamlearn::testing
