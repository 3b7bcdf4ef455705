#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hamlearn/hamlearn.hpp"
#include "test_helpers.hpp"

using namespace hamlearn;
using hamlearn::testing::hyperfine_mask;
using hamlearn::testing::hyperfine_matrix;
using hamlearn::testing::hyperfine_weights;
using hamlearn::testing::random_symmetric;
using Catch::Approx;

TEST_CASE("weights_to_matrix lays out the upper triangle row-major") {
    const HamiltonianParam p(2, {1.5, -2.0, 3.25});
    const SymmetricMatrix m = weights_to_matrix(p);
    REQUIRE(m(0, 0) == 1.5);
    REQUIRE(m(0, 1) == -2.0);
    REQUIRE(m(1, 0) == -2.0);
    REQUIRE(m(1, 1) == 3.25);
}

TEST_CASE("hyperfine weights unpack to the block matrix") {
    const SymmetricMatrix m = hyperfine_matrix();
    REQUIRE(m(0, 0) == 1.0);
    REQUIRE(m(1, 1) == -1.0);
    REQUIRE(m(1, 2) == 2.0);
    REQUIRE(m(2, 1) == 2.0);
    REQUIRE(m(2, 2) == -1.0);
    REQUIRE(m(3, 3) == 1.0);
    REQUIRE(m(0, 1) == 0.0);
    REQUIRE(m(0, 3) == 0.0);
    REQUIRE(m(1, 3) == 0.0);
}

TEST_CASE("zero weights give the zero matrix") {
    const SymmetricMatrix m = weights_to_matrix(HamiltonianParam::zeros(5));
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) REQUIRE(m(i, j) == 0.0);
}

TEST_CASE("weight count must match dim") {
    REQUIRE_THROWS_AS(HamiltonianParam(3, {1.0, 2.0}), contract_error);
}

TEST_CASE("matrix_to_weights inverts weights_to_matrix bitwise") {
    REQUIRE(matrix_to_weights(weights_to_matrix(HamiltonianParam(2, {1, 0, 1}))).weights ==
            std::vector<double>{1, 0, 1});
    REQUIRE(matrix_to_weights(hyperfine_matrix()) == hyperfine_weights());

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const HamiltonianParam p = random_hamiltonian(5, 3.0, seed);
        REQUIRE(matrix_to_weights(weights_to_matrix(p)) == p);
    }
}

TEST_CASE("weight vector length is n(n+1)/2") {
    REQUIRE(random_hamiltonian(4, 1.0, 0).weights.size() == 10);
    REQUIRE(random_hamiltonian(8, 1.0, 0).weights.size() == 36);
    REQUIRE(random_hamiltonian(30, 1.0, 0).weights.size() == 465);
    for (std::size_t n = 1; n <= 64; ++n)
        REQUIRE(weight_count(n) == n * (n + 1) / 2);
}

TEST_CASE("masks zero exactly their complement") {
    const StructureMask mask = hyperfine_mask();
    const HamiltonianParam dense = random_hamiltonian(4, 1.0, 77);
    const HamiltonianParam masked = apply_mask(dense, mask);
    const SymmetricMatrix m = weights_to_matrix(masked);

    // only the conserved-spin block survives
    REQUIRE(m(0, 0) == dense.at(0, 0));
    REQUIRE(m(1, 1) == dense.at(1, 1));
    REQUIRE(m(1, 2) == dense.at(1, 2));
    REQUIRE(m(2, 2) == dense.at(2, 2));
    REQUIRE(m(3, 3) == dense.at(3, 3));
    for (const auto &[i, j] : std::vector<std::pair<int, int>>{
             {0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}}) {
        REQUIRE(m(i, j) == 0.0);
        REQUIRE(m(j, i) == 0.0);
    }
}

TEST_CASE("mask edge cases and idempotence") {
    const HamiltonianParam dense = random_hamiltonian(4, 1.0, 3);
    REQUIRE(apply_mask(dense, StructureMask::full(4)) == dense);
    REQUIRE(apply_mask(dense, StructureMask::empty(4)) == HamiltonianParam::zeros(4));

    const StructureMask mask = hyperfine_mask();
    const HamiltonianParam once = apply_mask(dense, mask);
    REQUIRE(apply_mask(once, mask) == once);

    REQUIRE_THROWS_AS(apply_mask(dense, StructureMask::full(3)), contract_error);
    REQUIRE_THROWS_AS(StructureMask::from_pairs(3, {{2, 1}}), contract_error);
}

TEST_CASE("random Hamiltonians are deterministic per seed") {
    REQUIRE(random_hamiltonian(6, 1.0, 12345) == random_hamiltonian(6, 1.0, 12345));
    REQUIRE(random_hamiltonian(6, 1.0, 12345) != random_hamiltonian(6, 1.0, 12346));
}

TEST_CASE("random weights are centered and bounded") {
    const int samples = 10000;
    std::vector<double> sum(weight_count(4), 0.0);
    for (int s = 0; s < samples; ++s) {
        const HamiltonianParam p = random_hamiltonian(4, 1.0, 50000 + s);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            REQUIRE(std::abs(p.weights[k]) <= 1.0);
            sum[k] += p.weights[k];
        }
    }
    for (double s : sum) REQUIRE(std::abs(s / samples) <= 0.05);
}

TEST_CASE("shift-aligned error vanishes on the shift family") {
    const SymmetricMatrix a = random_symmetric(4, 1.0, 8);
    REQUIRE(shift_aligned_error(a, a) <= 1e-12);
    for (double f : {7.0, -2.5, 1e-3})
        REQUIRE(shift_aligned_error(a, shifted(a, f)) <= 1e-10);
}

TEST_CASE("shift-aligned error of diag(0,0) vs diag(1,-1) is 1") {
    // best f is 0: min over f of max(|1-f|, |-1-f|)
    const ShiftAlignment alignment =
        shift_alignment(SymmetricMatrix::diagonal({0.0, 0.0}), SymmetricMatrix::diagonal({1.0, -1.0}));
    REQUIRE(alignment.error == Approx(1.0).margin(1e-10));
    REQUIRE(alignment.f_star == Approx(0.0).margin(1e-10));
}

TEST_CASE("shift-aligned error is a pseudometric") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SymmetricMatrix a = random_symmetric(4, 1.0, 3 * seed);
        const SymmetricMatrix b = random_symmetric(4, 1.0, 3 * seed + 1);
        const SymmetricMatrix c = random_symmetric(4, 1.0, 3 * seed + 2);
        const double ab = shift_aligned_error(a, b);
        const double ba = shift_aligned_error(b, a);
        const double bc = shift_aligned_error(b, c);
        const double ac = shift_aligned_error(a, c);
        REQUIRE(ab == Approx(ba).margin(1e-10));
        REQUIRE(ac <= ab + bc + 1e-9);
        REQUIRE(ab >= 0.0);
    }
}

TEST_CASE("shift alignment recovers the aligning constant") {
    const SymmetricMatrix a = random_symmetric(5, 1.0, 31);
    const ShiftAlignment alignment = shift_alignment(shifted(a, 3.75), a);
    REQUIRE(alignment.f_star == Approx(3.75).margin(1e-9));
    REQUIRE(alignment.error <= 1e-10);
}

TEST_CASE("shift alignment handles dim mismatch") {
    REQUIRE_THROWS_AS(shift_aligned_error(SymmetricMatrix(2), SymmetricMatrix(3)), contract_error);
}
