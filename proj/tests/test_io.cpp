#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hamlearn/hamlearn.hpp"
#include "test_helpers.hpp"

using namespace hamlearn;
using hamlearn::testing::hyperfine_table;
using hamlearn::testing::hyperfine_weights;
using hamlearn::testing::random_symmetric;
using Catch::Approx;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hamlearn_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string &name) const { return (path / name).string(); }
    static int &counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("hamiltonian files round-trip losslessly") {
    TempDir dir;
    const HamiltonianParam p = random_hamiltonian(5, 2.0, 404);
    save_hamiltonian(dir.file("h.json"), p);
    const HamiltonianFile loaded = load_hamiltonian(dir.file("h.json"));
    REQUIRE(loaded.param == p); // bitwise: every double survives the file
    REQUIRE_FALSE(loaded.mask.has_value());
}

TEST_CASE("hamiltonian files carry an optional 1-based mask") {
    TempDir dir;
    const StructureMask mask = testing::hyperfine_mask();
    save_hamiltonian(dir.file("h.json"), hyperfine_weights(), mask);
    const HamiltonianFile loaded = load_hamiltonian(dir.file("h.json"));
    REQUIRE(loaded.mask.has_value());
    REQUIRE(*loaded.mask == mask);

    const json j = hamlearn::detail::parse_json_file(dir.file("h.json"));
    REQUIRE(j.at("mask")[2] == json::array({2, 3}));
}

TEST_CASE("hamiltonian file validation") {
    TempDir dir;
    hamlearn::detail::write_file(dir.file("bad.json"), "{\"dim\": 3, \"weights\": [1, 2]}\n");
    REQUIRE_THROWS_AS(load_hamiltonian(dir.file("bad.json")), data_error);
    hamlearn::detail::write_file(dir.file("mask.json"),
                                 "{\"dim\": 2, \"weights\": [1,2,3], \"mask\": [[2,1]]}\n");
    REQUIRE_THROWS_AS(load_hamiltonian(dir.file("mask.json")), data_error);
    hamlearn::detail::write_file(dir.file("syntax.json"), "{\"dim\": \n");
    REQUIRE_THROWS_AS(load_hamiltonian(dir.file("syntax.json")), data_error);
    REQUIRE_THROWS_AS(load_hamiltonian(dir.file("missing.json")), data_error);
}

TEST_CASE("count tables round-trip through JSON") {
    TempDir dir;
    CountTable table = hyperfine_table();
    table.rows[1].prepared = PreparedState::pair(1, 3); // exercise every kind
    table.rows[1].counts = {400, 200, 224, 200};
    save_count_table(dir.file("t.json"), table);
    const CountTable loaded = load_count_table_json(dir.file("t.json"));

    REQUIRE(loaded.dim == table.dim);
    REQUIRE(loaded.rows.size() == table.rows.size());
    const auto before = pairs_from_table(table);
    const auto after = pairs_from_table(loaded);
    for (std::size_t r = 0; r < before.size(); ++r) {
        REQUIRE(before[r].psi == after[r].psi);
        REQUIRE(before[r].phi == after[r].phi);
        REQUIRE(before[r].t == after[r].t);
    }

    // a second write is byte-identical
    save_count_table(dir.file("t2.json"), loaded);
    REQUIRE(hamlearn::detail::read_file(dir.file("t.json")) ==
            hamlearn::detail::read_file(dir.file("t2.json")));
}

TEST_CASE("exact-mode tables keep complex outputs through the file") {
    TempDir dir;
    const SymmetricMatrix h = random_symmetric(3, 1.0, 9);
    const CountTable table =
        simulate_counts(h, standard_input_descriptors(3), 0.785, std::nullopt, 0);
    save_count_table(dir.file("exact.json"), table);
    const auto before = pairs_from_table(table);
    const auto after = pairs_from_table(load_count_table_json(dir.file("exact.json")));
    for (std::size_t r = 0; r < before.size(); ++r)
        for (std::size_t k = 0; k < 3; ++k)
            REQUIRE(before[r].phi[k] == after[r].phi[k]); // bitwise
}

TEST_CASE("count table JSON validation names the row") {
    TempDir dir;
    hamlearn::detail::write_file(
        dir.file("bad.json"),
        R"({"dim": 2, "rows": [
             {"prepared": {"kind": "basis", "index": 1}, "counts": [5, 5], "shots": 10, "t": 0.5},
             {"prepared": {"kind": "basis", "index": 2}, "counts": [5, 6], "shots": 10, "t": 0.5}
           ]})");
    REQUIRE_THROWS_WITH(load_count_table_json(dir.file("bad.json")),
                        Catch::Matchers::ContainsSubstring("row 2"));

    hamlearn::detail::write_file(
        dir.file("kind.json"),
        R"({"dim": 2, "rows": [
             {"prepared": {"kind": "mystery"}, "counts": [10, 0], "shots": 10, "t": 0.5}
           ]})");
    REQUIRE_THROWS_WITH(load_count_table_json(dir.file("kind.json")),
                        Catch::Matchers::ContainsSubstring("mystery"));
}

TEST_CASE("CSV ingestion matches the hand-built hyperfine table") {
    const std::string path = std::string(HAMLEARN_TEST_DATA_DIR) + "/table1.csv";
    const CountTable table = load_count_table_csv(path, 0.785, 1024);
    REQUIRE(table.dim == 4);
    REQUIRE(table.rows.size() == 5);

    const auto expected = pairs_from_table(hyperfine_table());
    const auto parsed = pairs_from_table(table);
    for (std::size_t r = 0; r < expected.size(); ++r) {
        REQUIRE(parsed[r].psi == expected[r].psi);
        REQUIRE(parsed[r].phi == expected[r].phi);
        REQUIRE(parsed[r].t == 0.785);
    }
}

TEST_CASE("CSV parser diagnostics carry line numbers") {
    std::istringstream missing_field("label,State 1,State 2\nState 1,5\n");
    REQUIRE_THROWS_WITH(parse_table_csv(missing_field, 1.0, 5),
                        Catch::Matchers::ContainsSubstring("line 2"));

    std::istringstream bad_number("label,State 1,State 2\nState 1,5,x\n");
    REQUIRE_THROWS_WITH(parse_table_csv(bad_number, 1.0, 5),
                        Catch::Matchers::ContainsSubstring("not a number"));

    std::istringstream bad_label("label,State 1,State 2\nBanana,5,5\n");
    REQUIRE_THROWS_WITH(parse_table_csv(bad_label, 1.0, 10),
                        Catch::Matchers::ContainsSubstring("Banana"));

    std::istringstream empty("");
    REQUIRE_THROWS_AS(parse_table_csv(empty, 1.0, 10), data_error);
}

TEST_CASE("CSV accepts pair and uniform labels") {
    std::istringstream in("label,State 1,State 2\nPair 1 2,6,4\nUniform,5,5\n");
    const CountTable table = parse_table_csv(in, 0.5, 10);
    REQUIRE(table.rows[0].prepared.kind == PreparedState::Kind::Pair);
    REQUIRE(table.rows[0].prepared.i == 1);
    REQUIRE(table.rows[0].prepared.j == 2);
    REQUIRE(table.rows[1].prepared.kind == PreparedState::Kind::Uniform);
}

TEST_CASE("optimizer config files mirror the struct") {
    TempDir dir;
    hamlearn::detail::write_file(dir.file("cfg.json"),
                                 R"({"alpha": 0.01, "beta": 0.8, "max_iters": 500,
                                     "cost_tol": 1e-9, "restarts": 7, "seed": 42})");
    const OptimizerConfig cfg = load_config(dir.file("cfg.json"));
    REQUIRE(cfg.alpha == 0.01);
    REQUIRE(cfg.beta == 0.8);
    REQUIRE(cfg.max_iters == 500);
    REQUIRE(cfg.cost_tol == 1e-9);
    REQUIRE(cfg.restarts == 7);
    REQUIRE(cfg.seed == 42);
    REQUIRE(cfg.grad_tol == OptimizerConfig{}.grad_tol); // untouched default

    hamlearn::detail::write_file(dir.file("bad.json"), R"({"alhpa": 0.01})");
    REQUIRE_THROWS_WITH(load_config(dir.file("bad.json")),
                        Catch::Matchers::ContainsSubstring("alhpa"));
}

TEST_CASE("doubles survive JSON serialization bit-for-bit") {
    SplitMix64 rng(2024);
    json numbers = json::array();
    std::vector<double> values;
    for (int k = 0; k < 200; ++k) {
        double v = rng.uniform_symmetric(std::pow(10.0, static_cast<int>(rng.uniform01() * 8) - 4));
        values.push_back(v);
        numbers.push_back(v);
    }
    const json reparsed = json::parse(numbers.dump());
    for (int k = 0; k < 200; ++k) REQUIRE(reparsed[k].get<double>() == values[k]);
}

TEST_CASE("fit report serialization includes runs and reference errors") {
    FitReport report;
    report.final_cost = 0.25;
    report.final_mean_cost = 0.05;
    report.iterations = 12;
    report.learned = weights_to_matrix(hyperfine_weights());
    report.converged = true;
    report.reason = "cost_tol";
    report.reference_error = 1.5e-5;
    report.reference_error_raw = 2.0;
    report.runs.push_back(RunSummary{0, 99, 0.25, 12, "cost_tol"});

    const json j = fit_report_to_json(report);
    REQUIRE(j.at("final_cost") == 0.25);
    REQUIRE(j.at("learned").at("dim") == 4);
    REQUIRE(j.at("runs").size() == 1);
    REQUIRE(j.at("runs")[0].at("status") == "cost_tol");
    REQUIRE(j.at("reference_error") == 1.5e-5);
}

TEST_CASE("manifest digests identify file contents") {
    TempDir dir;
    hamlearn::detail::write_file(dir.file("a"), "hello");
    hamlearn::detail::write_file(dir.file("b"), "hello");
    hamlearn::detail::write_file(dir.file("c"), "hello!");
    REQUIRE(file_digest(dir.file("a")) == file_digest(dir.file("b")));
    REQUIRE(file_digest(dir.file("a")) != file_digest(dir.file("c")));
    REQUIRE(file_digest(dir.file("a")).rfind("fnv1a64:", 0) == 0);
}
