// Command-line front end: simulate measurement data from a known Hamiltonian,
// learn a Hamiltonian from count data, evaluate and compare candidates, and
// benchmark the matrix exponential.
//
// Exit codes: 0 success, 2 input error, 3 stopped at max_iters without
// reaching a tolerance, 4 optimization diverged, 1 internal numeric failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hamlearn/hamlearn.hpp"

namespace {

using namespace hamlearn;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitDiverged = 4;

struct GlobalOptions {
    std::uint64_t seed = 0;
    int threads = 1;
    bool quiet = false;
    std::string out;
};

std::string manifest_path(const std::string &out) { return out + ".manifest.json"; }

StructureMask load_mask_file(const std::string &path) {
    const json j = hamlearn::detail::parse_json_file(path);
    if (!j.contains("dim") || !j.contains("mask"))
        throw data_error(path + ": mask file needs fields \"dim\" and \"mask\"");
    return mask_from_json(j.at("dim").get<std::size_t>(), j.at("mask"), path);
}

std::optional<std::int64_t> parse_shots(const std::string &s) {
    if (s == "exact") return std::nullopt;
    try {
        const long long v = std::stoll(s);
        if (v <= 0) throw data_error("--shots must be positive or \"exact\"");
        return v;
    } catch (const data_error &) {
        throw;
    } catch (const std::exception &) {
        throw data_error("--shots must be an integer or \"exact\", got \"" + s + "\"");
    }
}

int cmd_simulate(const GlobalOptions &global, const std::string &truth_path, double t,
                 const std::string &shots_str, double noise, bool table1_inputs) {
    const auto t0 = std::chrono::steady_clock::now();
    if (global.out.empty()) throw data_error("simulate: --out is required");
    const HamiltonianFile truth = load_hamiltonian(truth_path);
    const SymmetricMatrix h = weights_to_matrix(truth.param);
    const std::optional<std::int64_t> shots = parse_shots(shots_str);

    const std::vector<PreparedState> inputs = table1_inputs
                                                  ? basis_plus_uniform_descriptors(h.dim())
                                                  : standard_input_descriptors(h.dim());
    const CountTable table = simulate_counts(h, inputs, t, shots, global.seed, noise);
    save_count_table(global.out, table);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.seed = global.seed;
    manifest.config = json{{"t", t},
                           {"shots", shots ? json(*shots) : json("exact")},
                           {"noise", noise},
                           {"inputs", table1_inputs ? "table1" : "standard"}};
    manifest.inputs.emplace_back(truth_path, file_digest(truth_path));
    manifest.outputs.push_back(global.out);
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save_manifest(manifest_path(global.out), manifest);

    if (!global.quiet)
        std::cout << "wrote " << table.rows.size() << " rows (dim " << table.dim << ") to "
                  << global.out << "\n";
    return kExitOk;
}

int cmd_learn(const GlobalOptions &global, const std::string &data_path,
              const std::string &config_path, const std::string &mask_path,
              const std::string &reference_path, double csv_t, std::int64_t csv_shots,
              const std::string &warm_start_path, const CLI::App *cmd) {
    const auto t0 = std::chrono::steady_clock::now();
    if (global.out.empty()) throw data_error("learn: --out is required");

    OptimizerConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.seed = global.seed;
    cfg.threads = global.threads;

    // explicit flags override the config file
    const auto override_if_set = [cmd](const char *name, auto &target) {
        const CLI::Option *opt = cmd->get_option(name);
        if (opt->count() > 0) target = opt->as<std::decay_t<decltype(target)>>();
    };
    override_if_set("--alpha", cfg.alpha);
    override_if_set("--beta", cfg.beta);
    override_if_set("--max-iters", cfg.max_iters);
    override_if_set("--cost-tol", cfg.cost_tol);
    override_if_set("--grad-tol", cfg.grad_tol);
    override_if_set("--fd-step", cfg.fd_step);
    override_if_set("--init-scale", cfg.init_scale);
    override_if_set("--restarts", cfg.restarts);

    const CountTable table = load_count_table(data_path, csv_t, csv_shots);
    if (table.rows.empty()) throw data_error(data_path + ": data file has no rows");
    const std::vector<DataPair> pairs = pairs_from_table(table);

    if (!mask_path.empty()) cfg.mask = load_mask_file(mask_path);
    if (cfg.mask && cfg.mask->dim() != table.dim)
        throw data_error(mask_path + ": mask dim " + std::to_string(cfg.mask->dim()) +
                         " does not match data dim " + std::to_string(table.dim));

    std::optional<SymmetricMatrix> reference;
    if (!reference_path.empty()) {
        const HamiltonianFile ref = load_hamiltonian(reference_path);
        if (ref.param.dim != table.dim)
            throw data_error(reference_path + ": reference dim does not match data dim");
        reference = weights_to_matrix(ref.param);
    }
    if (!warm_start_path.empty()) {
        const HamiltonianFile warm = load_hamiltonian(warm_start_path);
        if (warm.param.dim != table.dim)
            throw data_error(warm_start_path + ": warm-start dim does not match data dim");
        cfg.warm_start = warm.param;
    }

    const FitReport report = fit(pairs, table.dim, cfg, reference ? &*reference : nullptr);

    const std::string learned_path = global.out + ".hamiltonian.json";
    const std::string report_path = global.out + ".report.json";
    save_hamiltonian(learned_path, matrix_to_weights(report.learned));
    hamlearn::detail::write_file(report_path, fit_report_to_json(report).dump(2) + "\n");

    RunManifest manifest;
    manifest.command = "learn";
    manifest.seed = cfg.seed;
    manifest.config = config_to_json(cfg);
    if (cfg.mask) manifest.config["mask"] = mask_to_json(*cfg.mask);
    manifest.inputs.emplace_back(data_path, file_digest(data_path));
    if (!config_path.empty()) manifest.inputs.emplace_back(config_path, file_digest(config_path));
    if (!mask_path.empty()) manifest.inputs.emplace_back(mask_path, file_digest(mask_path));
    if (!reference_path.empty())
        manifest.inputs.emplace_back(reference_path, file_digest(reference_path));
    if (!warm_start_path.empty())
        manifest.inputs.emplace_back(warm_start_path, file_digest(warm_start_path));
    manifest.outputs = {learned_path, report_path};
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save_manifest(manifest_path(global.out), manifest);

    if (!global.quiet) {
        std::cout << std::setprecision(17);
        std::cout << "status " << report.reason << "\n"
                  << "final_cost " << report.final_cost << "\n"
                  << "final_mean_cost " << report.final_mean_cost << "\n"
                  << "iterations " << report.iterations << "\n";
        if (report.reference_error)
            std::cout << "reference_error " << *report.reference_error << "\n"
                      << "reference_error_raw " << *report.reference_error_raw << "\n";
    }

    if (report.reason == "diverged") return kExitDiverged;
    if (report.reason == "max_iters") return kExitNotConverged;
    return kExitOk;
}

int cmd_eval(const GlobalOptions &global, const std::string &hamiltonian_path,
             const std::string &data_path, double csv_t, std::int64_t csv_shots) {
    const HamiltonianFile file = load_hamiltonian(hamiltonian_path);
    const CountTable table = load_count_table(data_path, csv_t, csv_shots);
    if (file.param.dim != table.dim)
        throw contract_error("eval: Hamiltonian dim " + std::to_string(file.param.dim) +
                             " does not match data dim " + std::to_string(table.dim));
    const std::vector<DataPair> pairs = pairs_from_table(table);
    const CostValue value = cost(file.param, pairs);

    std::cout << std::setprecision(17);
    std::cout << "pairs " << value.per_pair.size() << "\n"
              << "total " << value.total << "\n"
              << "mean " << value.mean() << "\n";
    if (!global.quiet)
        for (std::size_t i = 0; i < value.per_pair.size(); ++i)
            std::cout << "pair " << i + 1 << " " << value.per_pair[i] << "\n";
    return kExitOk;
}

int cmd_compare(const std::string &a_path, const std::string &b_path) {
    const HamiltonianFile a = load_hamiltonian(a_path);
    const HamiltonianFile b = load_hamiltonian(b_path);
    if (a.param.dim != b.param.dim)
        throw contract_error("compare: dims differ (" + std::to_string(a.param.dim) + " vs " +
                             std::to_string(b.param.dim) + ")");
    const SymmetricMatrix ma = weights_to_matrix(a.param);
    const SymmetricMatrix mb = weights_to_matrix(b.param);
    const ShiftAlignment alignment = shift_alignment(ma, mb);

    std::cout << std::setprecision(17);
    std::cout << "raw_max_norm " << max_norm(to_complex(ma - mb)) << "\n"
              << "shift_aligned_error " << alignment.error << "\n"
              << "f_star " << alignment.f_star << "\n";
    return kExitOk;
}

int cmd_bench_expm(const GlobalOptions &global, std::vector<std::size_t> sizes, int trials,
                   double t, int terms) {
    if (global.out.empty()) throw data_error("bench-expm: --out is required");
    if (trials < 1) throw data_error("bench-expm: --trials must be >= 1");
    if (sizes.empty()) sizes = {2, 4, 8};

    std::ostringstream csv;
    csv << "n,method,mean_ns,stddev_ns,max_norm_diff\n";
    csv << std::setprecision(17);
    bool oracle_ok = true;
    double worst = 0.0;

    for (const std::size_t n : sizes) {
        std::vector<double> ns_eig, ns_taylor;
        double max_diff = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            const HamiltonianParam p =
                random_hamiltonian(n, 1.0, derive_seed(global.seed, n * 10007 + trial));
            const SymmetricMatrix h = weights_to_matrix(p);

            const auto t0 = std::chrono::steady_clock::now();
            const ComplexMatrix via_eig = expm_unitary(h, t);
            const auto t1 = std::chrono::steady_clock::now();
            const ComplexMatrix via_taylor = expm_taylor_scaled(h, t, terms);
            const auto t2 = std::chrono::steady_clock::now();

            ns_eig.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
            ns_taylor.push_back(std::chrono::duration<double, std::nano>(t2 - t1).count());
            max_diff = std::max(max_diff, max_norm(via_eig - via_taylor));
        }
        const auto stats = [](const std::vector<double> &xs) {
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= static_cast<double>(xs.size());
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        const auto [mean_eig, sd_eig] = stats(ns_eig);
        const auto [mean_taylor, sd_taylor] = stats(ns_taylor);
        csv << n << ",eig," << mean_eig << "," << sd_eig << "," << max_diff << "\n";
        csv << n << ",taylor," << mean_taylor << "," << sd_taylor << "," << max_diff << "\n";
        if (!global.quiet)
            std::cout << "n=" << n << " eig " << mean_eig << " ns, taylor " << mean_taylor
                      << " ns, ratio " << mean_taylor / mean_eig << ", max_norm_diff " << max_diff
                      << "\n";
        worst = std::max(worst, max_diff);
        oracle_ok = oracle_ok && max_diff <= 1e-12;
    }

    hamlearn::detail::write_file(global.out, csv.str());
    if (!oracle_ok) {
        std::cerr << "bench-expm: methods disagree beyond 1e-12 (max_norm_diff " << worst << ")\n";
        return kExitInternal;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Learns real symmetric Hamiltonians from measurement-count data"};
    app.set_version_flag("--version", std::string(hamlearn::kToolName) + " " +
                                          hamlearn::kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--seed", global.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads for gradient evaluation")
        ->capture_default_str();
    app.add_flag("--quiet", global.quiet, "Suppress informational output");
    app.add_option("--out", global.out, "Output path (or prefix for commands with several files)");

    // simulate
    auto *sim = app.add_subcommand("simulate", "Generate a count table from a known Hamiltonian");
    std::string sim_truth;
    double sim_t = 0.785;
    std::string sim_shots = "exact";
    double sim_noise = 0.0;
    bool sim_table1 = false;
    sim->add_option("--truth", sim_truth, "Hamiltonian JSON file to treat as the black box")
        ->required();
    sim->add_option("--t", sim_t, "Evolution time")->capture_default_str();
    sim->add_option("--shots", sim_shots, "Shots per input state, or \"exact\"")
        ->capture_default_str();
    sim->add_option("--noise", sim_noise, "Depolarizing noise fraction in [0,1)")
        ->capture_default_str();
    sim->add_flag("--table1-inputs", sim_table1,
                  "Use only the n basis states plus the uniform superposition");

    // learn
    auto *learn = app.add_subcommand("learn", "Fit a Hamiltonian to a count table");
    std::string learn_data, learn_config, learn_mask, learn_reference, learn_warm;
    double learn_csv_t = 0.785;
    std::int64_t learn_csv_shots = 1024;
    learn->add_option("--data", learn_data, "Count table (JSON, or CSV with --t/--shots)")
        ->required();
    learn->add_option("--config", learn_config, "Optimizer config JSON");
    learn->add_option("--mask", learn_mask, "Structure mask JSON ({\"dim\", \"mask\"})");
    learn->add_option("--reference", learn_reference,
                      "Known true Hamiltonian; adds error metrics to the report");
    learn->add_option("--warm-start", learn_warm, "Initial weights for run 0");
    learn->add_option("--t", learn_csv_t, "Evolution time for CSV data")->capture_default_str();
    learn->add_option("--shots", learn_csv_shots, "Shots per row for CSV data")
        ->capture_default_str();
    learn->add_option("--alpha", "Learning rate");
    learn->add_option("--beta", "Momentum decay in [0,1)");
    learn->add_option("--max-iters", "Iteration cap per run")->type_name("INT");
    learn->add_option("--cost-tol", "Stop when total cost falls below this");
    learn->add_option("--grad-tol", "Stop when the max-abs gradient falls below this");
    learn->add_option("--fd-step", "Finite-difference step");
    learn->add_option("--init-scale", "Uniform initialization range");
    learn->add_option("--restarts", "Extra random restarts")->type_name("INT");

    // eval
    auto *eval = app.add_subcommand("eval", "Evaluate a Hamiltonian's cost against data");
    std::string eval_h, eval_data;
    double eval_csv_t = 0.785;
    std::int64_t eval_csv_shots = 1024;
    eval->add_option("--hamiltonian", eval_h, "Hamiltonian JSON file")->required();
    eval->add_option("--data", eval_data, "Count table (JSON or CSV)")->required();
    eval->add_option("--t", eval_csv_t, "Evolution time for CSV data")->capture_default_str();
    eval->add_option("--shots", eval_csv_shots, "Shots per row for CSV data")
        ->capture_default_str();

    // compare
    auto *compare = app.add_subcommand("compare", "Distance between two Hamiltonians");
    std::string cmp_a, cmp_b;
    compare->add_option("--a", cmp_a, "First Hamiltonian JSON file")->required();
    compare->add_option("--b", cmp_b, "Second Hamiltonian JSON file")->required();

    // bench-expm
    auto *bench = app.add_subcommand("bench-expm",
                                     "Time the eigendecomposition exponential against the "
                                     "scaled Taylor reference");
    std::vector<std::size_t> bench_sizes;
    int bench_trials = 100;
    double bench_t = 0.785;
    int bench_terms = 30;
    bench->add_option("--sizes", bench_sizes, "Matrix sizes to benchmark")->delimiter(',');
    bench->add_option("--trials", bench_trials, "Trials per size")->capture_default_str();
    bench->add_option("--t", bench_t, "Evolution time")->capture_default_str();
    bench->add_option("--terms", bench_terms, "Taylor terms")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(global, sim_truth, sim_t, sim_shots, sim_noise, sim_table1);
        if (learn->parsed())
            return cmd_learn(global, learn_data, learn_config, learn_mask, learn_reference,
                             learn_csv_t, learn_csv_shots, learn_warm, learn);
        if (eval->parsed())
            return cmd_eval(global, eval_h, eval_data, eval_csv_t, eval_csv_shots);
        if (compare->parsed()) return cmd_compare(cmp_a, cmp_b);
        if (bench->parsed())
            return cmd_bench_expm(global, bench_sizes, bench_trials, bench_t, bench_terms);
    } catch (const data_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const contract_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const numeric_error &e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
