#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamlearn/dataset.hpp"
#include "hamlearn/errors.hpp"
#include "hamlearn/hamiltonian.hpp"
#include "hamlearn/optimizer.hpp"
#include "hamlearn/version.hpp"

namespace hamlearn {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << content;
}

inline json parse_json_file(const std::string &path) {
    try {
        return json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw data_error(path + ": " + e.what());
    }
}

inline json complex_vector_to_json(const CVector &v) {
    json re = json::array(), im = json::array();
    for (const auto &x : v) {
        re.push_back(x.real());
        im.push_back(x.imag());
    }
    return json{{"re", re}, {"im", im}};
}

inline CVector complex_vector_from_json(const json &j, const std::string &where) {
    if (!j.contains("re") || !j.contains("im"))
        throw data_error(where + ": expected fields \"re\" and \"im\"");
    const auto &re = j.at("re");
    const auto &im = j.at("im");
    if (re.size() != im.size()) throw data_error(where + ": re/im length mismatch");
    CVector v(re.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = Complex(re[k].get<double>(), im[k].get<double>());
    return v;
}

} // namespace detail

/// FNV-1a 64-bit digest, hex encoded. Recorded in run manifests so inputs of
/// a run can be identified later.
inline std::string fnv1a64_hex(const std::string &bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_digest(const std::string &path) {
    return "fnv1a64:" + fnv1a64_hex(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Hamiltonian files: { "dim": n, "weights": [w11, w12, ..., wnn] } with an
// optional "mask": [[i, j], ...] of 1-based allowed index pairs.
// ---------------------------------------------------------------------------

struct HamiltonianFile {
    HamiltonianParam param;
    std::optional<StructureMask> mask;
};

inline json mask_to_json(const StructureMask &mask) {
    json pairs = json::array();
    for (const auto &[i, j] : mask.allowed_pairs())
        pairs.push_back(json::array({i + 1, j + 1}));
    return pairs;
}

inline StructureMask mask_from_json(std::size_t dim, const json &pairs, const std::string &where) {
    StructureMask mask(dim);
    for (const auto &p : pairs) {
        if (!p.is_array() || p.size() != 2)
            throw data_error(where + ": mask entries must be [i, j] pairs");
        const long long i = p[0].get<long long>(), j = p[1].get<long long>();
        if (i < 1 || j < static_cast<long long>(i) || j > static_cast<long long>(dim))
            throw data_error(where + ": mask pair (" + std::to_string(i) + "," +
                             std::to_string(j) + ") out of range, indices are 1-based with i <= j");
        mask.allow(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
    }
    return mask;
}

inline json hamiltonian_to_json(const HamiltonianParam &p,
                                const std::optional<StructureMask> &mask = std::nullopt) {
    json j{{"dim", p.dim}, {"weights", p.weights}};
    if (mask) j["mask"] = mask_to_json(*mask);
    return j;
}

inline HamiltonianFile hamiltonian_from_json(const json &j, const std::string &where) {
    if (!j.contains("dim") || !j.contains("weights"))
        throw data_error(where + ": expected fields \"dim\" and \"weights\"");
    const std::size_t dim = j.at("dim").get<std::size_t>();
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != weight_count(dim))
        throw data_error(where + ": dim " + std::to_string(dim) + " requires " +
                         std::to_string(weight_count(dim)) + " weights, found " +
                         std::to_string(weights.size()));
    HamiltonianFile out{HamiltonianParam(dim, std::move(weights)), std::nullopt};
    if (j.contains("mask")) out.mask = mask_from_json(dim, j.at("mask"), where);
    return out;
}

inline HamiltonianFile load_hamiltonian(const std::string &path) {
    return hamiltonian_from_json(detail::parse_json_file(path), path);
}

inline void save_hamiltonian(const std::string &path, const HamiltonianParam &p,
                             const std::optional<StructureMask> &mask = std::nullopt) {
    detail::write_file(path, hamiltonian_to_json(p, mask).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Count tables. JSON rows carry a tagged prepared-state descriptor; state
// indices are 1-based. Exact-mode rows additionally carry the complex
// "output" amplitudes.
// ---------------------------------------------------------------------------

inline json prepared_to_json(const PreparedState &p) {
    switch (p.kind) {
    case PreparedState::Kind::Basis:
        return json{{"kind", "basis"}, {"index", p.index}};
    case PreparedState::Kind::Uniform:
        return json{{"kind", "uniform"}};
    case PreparedState::Kind::Pair:
        return json{{"kind", "pair"}, {"i", p.i}, {"j", p.j}};
    case PreparedState::Kind::Amplitudes: {
        json j = detail::complex_vector_to_json(p.amplitudes);
        j["kind"] = "amplitudes";
        return json{{"kind", "amplitudes"}, {"re", j["re"]}, {"im", j["im"]}};
    }
    }
    throw data_error("prepared state: unknown kind");
}

inline PreparedState prepared_from_json(const json &j, const std::string &where) {
    const std::string kind = j.value("kind", "");
    if (kind == "basis") return PreparedState::basis(j.at("index").get<int>());
    if (kind == "uniform") return PreparedState::uniform();
    if (kind == "pair") return PreparedState::pair(j.at("i").get<int>(), j.at("j").get<int>());
    if (kind == "amplitudes")
        return PreparedState::from_amplitudes(detail::complex_vector_from_json(j, where));
    throw data_error(where + ": unknown prepared-state kind \"" + kind + "\"");
}

inline json count_table_to_json(const CountTable &table) {
    json rows = json::array();
    for (const CountRow &row : table.rows) {
        json r{{"prepared", prepared_to_json(row.prepared)},
               {"counts", row.counts},
               {"shots", row.shots},
               {"t", row.t}};
        if (row.exact_output) r["output"] = detail::complex_vector_to_json(*row.exact_output);
        rows.push_back(std::move(r));
    }
    return json{{"dim", table.dim}, {"rows", rows}};
}

inline CountTable count_table_from_json(const json &j, const std::string &where) {
    if (!j.contains("dim") || !j.contains("rows"))
        throw data_error(where + ": expected fields \"dim\" and \"rows\"");
    CountTable table;
    table.dim = j.at("dim").get<std::size_t>();
    std::size_t index = 0;
    for (const auto &r : j.at("rows")) {
        ++index;
        const std::string row_where = where + ", row " + std::to_string(index);
        CountRow row;
        row.prepared = prepared_from_json(r.at("prepared"), row_where);
        row.counts = r.at("counts").get<std::vector<double>>();
        row.shots = r.at("shots").get<std::int64_t>();
        row.t = r.at("t").get<double>();
        if (r.contains("output"))
            row.exact_output = detail::complex_vector_from_json(r.at("output"), row_where);
        table.rows.push_back(std::move(row));
    }
    validate(table);
    return table;
}

inline CountTable load_count_table_json(const std::string &path) {
    return count_table_from_json(detail::parse_json_file(path), path);
}

inline void save_count_table(const std::string &path, const CountTable &table) {
    detail::write_file(path, count_table_to_json(table).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV ingestion for tables shaped like the worked hyperfine dataset: a header
// row, one prepared-state label column, n count columns. The evolution time
// and shot count are not part of the file and must be supplied by the caller.
// Accepted labels: "State k", "Uniform Superposition" (or "Uniform"),
// "Pair i j".
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    for (auto &f : fields) {
        const auto begin = f.find_first_not_of(" \t");
        const auto end = f.find_last_not_of(" \t");
        f = begin == std::string::npos ? "" : f.substr(begin, end - begin + 1);
    }
    return fields;
}

inline std::string lowercase(std::string s) {
    for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline PreparedState parse_state_label(const std::string &label, int line_no) {
    const std::string low = lowercase(label);
    if (low.rfind("uniform", 0) == 0) return PreparedState::uniform();
    std::istringstream ss(low);
    std::string word;
    ss >> word;
    if (word == "state") {
        int k;
        if (ss >> k) return PreparedState::basis(k);
    } else if (word == "pair") {
        int i, j;
        if (ss >> i >> j) return PreparedState::pair(i, j);
    }
    throw data_error("csv line " + std::to_string(line_no) + ": unrecognized state label \"" +
                     label + "\"");
}

} // namespace detail

inline CountTable parse_table_csv(std::istream &in, double t, std::int64_t shots) {
    std::string line;
    int line_no = 0;
    CountTable table;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (!have_header) {
            if (fields.size() < 2)
                throw data_error("csv line " + std::to_string(line_no) +
                                 ": header must have a label column and count columns");
            table.dim = fields.size() - 1;
            have_header = true;
            continue;
        }
        if (fields.size() != table.dim + 1)
            throw data_error("csv line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.dim + 1) + " fields, got " +
                             std::to_string(fields.size()));
        CountRow row;
        row.prepared = detail::parse_state_label(fields[0], line_no);
        row.shots = shots;
        row.t = t;
        for (std::size_t k = 1; k < fields.size(); ++k) {
            try {
                row.counts.push_back(std::stod(fields[k]));
            } catch (const std::exception &) {
                throw data_error("csv line " + std::to_string(line_no) + ", field " +
                                 std::to_string(k + 1) + ": not a number: \"" + fields[k] + "\"");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw data_error("csv: empty file");
    validate(table);
    return table;
}

inline CountTable load_count_table_csv(const std::string &path, double t, std::int64_t shots) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file: " + path);
    try {
        return parse_table_csv(in, t, shots);
    } catch (const data_error &e) {
        throw data_error(path + ": " + e.what());
    }
}

inline bool has_suffix(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Dispatches on extension: .csv goes through the tabular reader (t and shots
/// from the caller), anything else is parsed as count-table JSON.
inline CountTable load_count_table(const std::string &path, double csv_t, std::int64_t csv_shots) {
    if (has_suffix(detail::lowercase(path), ".csv"))
        return load_count_table_csv(path, csv_t, csv_shots);
    return load_count_table_json(path);
}

// ---------------------------------------------------------------------------
// Optimizer config files mirror OptimizerConfig field for field; every field
// is optional and defaults apply.
// ---------------------------------------------------------------------------

inline OptimizerConfig config_from_json(const json &j, const std::string &where) {
    OptimizerConfig cfg;
    const auto known = {"alpha",     "beta",     "max_iters", "cost_tol", "grad_tol",
                        "fd_step",   "init_scale", "restarts", "seed",     "threads"};
    for (const auto &[key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char *k : known) ok = ok || key == k;
        if (!ok) throw data_error(where + ": unknown config field \"" + key + "\"");
    }
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.cost_tol = j.value("cost_tol", cfg.cost_tol);
    cfg.grad_tol = j.value("grad_tol", cfg.grad_tol);
    cfg.fd_step = j.value("fd_step", cfg.fd_step);
    cfg.init_scale = j.value("init_scale", cfg.init_scale);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    return cfg;
}

inline OptimizerConfig load_config(const std::string &path) {
    return config_from_json(detail::parse_json_file(path), path);
}

inline json config_to_json(const OptimizerConfig &cfg) {
    json j{{"alpha", cfg.alpha},           {"beta", cfg.beta},
           {"max_iters", cfg.max_iters},   {"cost_tol", cfg.cost_tol},
           {"grad_tol", cfg.grad_tol},     {"fd_step", cfg.fd_step},
           {"init_scale", cfg.init_scale}, {"restarts", cfg.restarts},
           {"seed", cfg.seed},             {"threads", cfg.threads}};
    return j;
}

// ---------------------------------------------------------------------------
// Fit reports.
// ---------------------------------------------------------------------------

inline json fit_report_to_json(const FitReport &report) {
    json runs = json::array();
    for (const RunSummary &r : report.runs)
        runs.push_back(json{{"index", r.index},
                            {"seed", r.seed},
                            {"final_cost", r.final_cost},
                            {"iterations", r.iterations},
                            {"status", r.status}});
    json j{{"final_cost", report.final_cost},
           {"final_mean_cost", report.final_mean_cost},
           {"iterations", report.iterations},
           {"converged", report.converged},
           {"reason", report.reason},
           {"learned", hamiltonian_to_json(matrix_to_weights(report.learned))},
           {"wall_time_s", report.wall_time_s},
           {"runs", runs}};
    if (report.reference_error) {
        j["reference_error"] = *report.reference_error;
        j["reference_error_raw"] = *report.reference_error_raw;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Run manifests: emitted alongside every CLI output so a result can be
// re-derived from its inputs, seed, and resolved configuration.
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string command;
    json config;
    std::vector<std::pair<std::string, std::string>> inputs; // path, digest
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    std::vector<std::string> outputs;
};

inline json manifest_to_json(const RunManifest &m) {
    json inputs = json::object();
    for (const auto &[path, digest] : m.inputs) inputs[path] = digest;
    return json{{"tool", std::string(kToolName) + " " + kToolVersion},
                {"command", m.command},
                {"seed", m.seed},
                {"config", m.config},
                {"inputs", inputs},
                {"outputs", m.outputs},
                {"wall_time_s", m.wall_time_s}};
}

inline void save_manifest(const std::string &out_path, const RunManifest &m) {
    detail::write_file(out_path, manifest_to_json(m).dump(2) + "\n");
}

} // namespace hamlearn
