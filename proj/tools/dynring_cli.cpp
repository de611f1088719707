#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dynring/config_io.hpp"
#include "dynring/engine.hpp"
#include "dynring/oracle.hpp"
#include "dynring/trace.hpp"

namespace {

using dynring::json;

// Machine contract: stdout carries JSON, stderr carries text, the exit code
// carries the verdict.
constexpr int kExitOk = 0;
constexpr int kExitBound = 2;      // bound or invariant violated
constexpr int kExitIncomplete = 3; // exploration or termination missing
constexpr int kExitConfig = 4;
constexpr int kExitProtocol = 5;

enum class LogLevel { off = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* v = std::getenv("DYNRING_LOG");
    if (!v) return LogLevel::off;
    const std::string s(v);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::off;
}

void log(LogLevel lvl, const std::string& msg) {
    if (static_cast<int>(log_level()) >= static_cast<int>(lvl)) std::cerr << msg << '\n';
}

struct CellResult {
    int exit_code = kExitOk;
    json summary;
    std::string trace; // JSONL
};

CellResult run_cell(const dynring::SimulationConfig& config) {
    CellResult out;
    try {
        const dynring::RunResult result = dynring::run(config);
        out.trace = dynring::trace_string(config, result);
        const dynring::VerifyReport report = dynring::verify_trace_string(out.trace);

        json checks = json::array();
        for (const auto& c : report.checks)
            checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        out.summary = dynring::outcome_json(result.outcome);
        out.summary.erase("type");
        out.summary["verify"] = std::move(checks);
        out.summary["verify_ok"] = report.ok();

        const auto& o = result.outcome;
        const bool complete = config.task == dynring::Task::meet
                                  ? o.met
                                  : o.explored && o.all_terminated;
        if (!complete)
            out.exit_code = kExitIncomplete;
        else if (!o.bound_satisfied || !report.ok() || o.violation)
            out.exit_code = kExitBound;
    } catch (const dynring::ProtocolViolation& e) {
        out.exit_code = kExitProtocol;
        out.summary = json{{"error", e.what()}, {"round", e.round}};
    }
    return out;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    return json::parse(in);
}

void apply_overrides(dynring::SimulationConfig& config,
                     const std::optional<double>& max_rounds_multiplier,
                     const std::optional<std::uint64_t>& seed_override) {
    if (seed_override) config.adversary.seed = *seed_override;
    if (max_rounds_multiplier) {
        const auto bound =
            dynring::proven_bound(config.mode, config.task, config.id_length(), config.n);
        config.max_rounds =
            static_cast<std::int64_t>(*max_rounds_multiplier * static_cast<double>(bound));
    }
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& trace_path,
            const std::optional<double>& mult, const std::optional<std::uint64_t>& seed) {
    dynring::SimulationConfig config;
    try {
        config = dynring::config_from_json(load_json_file(config_path));
        apply_overrides(config, mult, seed);
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const CellResult cell = run_cell(config);
    if (cell.exit_code == kExitProtocol) {
        std::cerr << cell.summary.value("error", std::string("protocol violation")) << '\n';
        return kExitProtocol;
    }
    if (trace_path) {
        std::ofstream out(*trace_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write trace: " << *trace_path << '\n';
            return kExitConfig;
        }
        out << cell.trace;
    }
    std::cout << cell.summary.dump() << '\n';
    return cell.exit_code;
}

int cmd_batch(const std::string& manifest_path, int jobs,
              const std::optional<double>& mult, const std::optional<std::uint64_t>& seed) {
    std::vector<dynring::SimulationConfig> cells;
    try {
        cells = dynring::expand_manifest(load_json_file(manifest_path));
        for (auto& c : cells) {
            apply_overrides(c, mult, seed);
            c.validate();
        }
    } catch (const std::exception& e) {
        std::cerr << "manifest error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (jobs < 1) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    std::vector<CellResult> results(cells.size());
    std::atomic<size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            results[i] = run_cell(cells[i]);
            log(LogLevel::info, "cell " + std::to_string(i) + "/" +
                                    std::to_string(cells.size()) + " exit " +
                                    std::to_string(results[i].exit_code));
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs && static_cast<size_t>(t) < cells.size(); ++t)
        pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json report;
    report["cells"] = json::array();
    int worst = kExitOk;
    int failures = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        json cell;
        cell["index"] = i;
        cell["config"] = dynring::config_to_json(cells[i]);
        cell["exit_code"] = results[i].exit_code;
        cell["summary"] = results[i].summary;
        report["cells"].push_back(std::move(cell));
        if (results[i].exit_code != kExitOk) {
            ++failures;
            worst = std::max(worst, results[i].exit_code);
        }
    }
    report["total"] = cells.size();
    report["failures"] = failures;
    std::cout << report.dump() << '\n';
    return worst;
}

int cmd_oracle(const std::string& check, const std::optional<int>& n,
               const std::optional<int>& k, const std::optional<int>& j,
               bool inverted_premise) {
    try {
        json verdict;
        bool pass = false;
        if (check == "lemma-main") {
            if (!n) throw std::invalid_argument("lemma-main: --n required");
            const auto res = dynring::check_lemma_main(
                *n, inverted_premise ? dynring::LemmaPremise::inverted
                                     : dynring::LemmaPremise::standard);
            pass = res.pass;
            verdict = json{{"check", "lemma-main"},
                           {"n", res.n},
                           {"pass", res.pass},
                           {"placements_checked", res.placements_checked},
                           {"placements_excluded", res.placements_excluded},
                           {"states_explored", res.states_explored},
                           {"sequences_per_placement", res.sequences_per_placement},
                           {"counterexample",
                            res.counterexample ? json(*res.counterexample) : json(nullptr)}};
        } else if (check == "agreement") {
            if (!k) throw std::invalid_argument("agreement: --k required");
            const auto res = dynring::check_agreement_indices(*k);
            pass = res.pass;
            verdict = json{{"check", "agreement"},
                           {"k", res.k},
                           {"pass", res.pass},
                           {"triples_checked", res.triples_checked},
                           {"counterexample",
                            res.counterexample ? json(*res.counterexample) : json(nullptr)}};
        } else if (check == "contiguous") {
            if (!k || !j) throw std::invalid_argument("contiguous: --k and --j required");
            const auto res = dynring::check_contiguous_block(*k, *j);
            pass = res.pass;
            verdict = json{{"check", "contiguous"},
                           {"k", res.k},
                           {"j", res.j},
                           {"pass", res.pass},
                           {"cases_checked", res.cases_checked},
                           {"counterexample",
                            res.counterexample ? json(*res.counterexample) : json(nullptr)}};
        } else {
            throw std::invalid_argument("unknown check: " + check);
        }
        std::cout << verdict.dump() << '\n';
        return pass ? kExitOk : kExitBound;
    } catch (const std::invalid_argument& e) {
        std::cerr << "oracle error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic-ring exploration simulator and verification harness"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, check;
    std::optional<std::string> trace_path;
    std::optional<double> mult;
    std::optional<std::uint64_t> seed;
    std::optional<int> opt_n, opt_k, opt_j;
    int jobs = 0;
    bool inverted_premise = false;

    auto* run = app.add_subcommand("run", "run one simulation and verify its trace");
    run->add_option("--config", config_path, "config JSON path")->required();
    run->add_option("--trace", trace_path, "write JSONL trace here");
    run->add_option("--max-rounds-multiplier", mult, "max_rounds = multiplier * bound");
    run->add_option("--seed-override", seed, "override adversary seed");

    auto* batch = app.add_subcommand("batch", "run a manifest of cells");
    batch->add_option("--manifest", manifest_path, "manifest JSON path")->required();
    batch->add_option("--jobs", jobs, "parallel cells (default: cores)");
    batch->add_option("--max-rounds-multiplier", mult, "max_rounds = multiplier * bound");
    batch->add_option("--seed-override", seed, "override adversary seeds");

    auto* oracle = app.add_subcommand("oracle", "brute-force checks on small instances");
    oracle->add_option("check", check, "lemma-main | agreement | contiguous")->required();
    oracle->add_option("--n", opt_n, "ring size (lemma-main)");
    oracle->add_option("--k", opt_k, "id length (agreement, contiguous)");
    oracle->add_option("--j", opt_j, "phase (contiguous)");
    oracle->add_flag("--inverted-premise", inverted_premise,
                     "lemma-main: flip the placement filter (sanity check)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (run->parsed()) return cmd_run(config_path, trace_path, mult, seed);
    if (batch->parsed()) return cmd_batch(manifest_path, jobs, mult, seed);
    return cmd_oracle(check, opt_n, opt_k, opt_j, inverted_premise);
}
