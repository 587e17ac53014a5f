// Batch driver: run episodes, export behavior-cloning data, recompute metrics.
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aesa/bc_dataset.hpp"
#include "aesa/env.hpp"
#include "aesa/summary.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigFailure = 2, kIoFailure = 3 };

aesa::EpisodeConfig config_or_default(const std::string& path) {
    return path.empty() ? aesa::EpisodeConfig{} : aesa::load_config(path);
}

std::string trace_name(const std::string& policy, std::uint64_t seed) {
    return "trace_" + policy + "_" + std::to_string(seed) + ".jsonl";
}

void write_file_trace(const fs::path& path, const aesa::EpisodeTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    aesa::write_trace(out, trace);
}

void write_summaries(const fs::path& dir, const std::vector<aesa::EpisodeSummary>& rows) {
    std::ofstream csv(dir / "summary.csv");
    if (!csv) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
    csv.precision(17);
    aesa::write_summary_csv_header(csv);
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : rows) {
        aesa::write_summary_csv_row(csv, r);
        all.push_back(aesa::to_json(r));
    }
    std::ofstream js(dir / "summary.json");
    js << all.dump(2) << '\n';
}

// Line-oriented protocol for an outside agent: one observation object per
// line on stdout, one action per line on stdin ("[a_psi, a_theta]" or
// {"action": [a_psi, a_theta]}).
aesa::BeamAction read_external_action(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto j = nlohmann::json::parse(line);
        const auto& a = j.is_object() ? j.at("action") : j;
        return {a.at(0).get<int>(), a.at(1).get<int>()};
    }
    throw aesa::ContractViolation("external policy: input closed before the episode finished");
}

aesa::EpisodeTrace run_external_episode(const aesa::EpisodeConfig& cfg) {
    aesa::Environment env(cfg);
    aesa::EpisodeTrace trace;
    trace.config = env.config();
    trace.policy = "external";
    aesa::Observation obs = env.reset();
    nlohmann::json msg = {{"type", "reset"},
                          {"seed", cfg.seed},
                          {"grid_size", env.grid().n},
                          {"n_steps", cfg.n_steps},
                          {"track_matrix", obs.track_matrix},
                          {"scan_raster", obs.scan_raster}};
    std::cout << msg.dump() << std::endl;
    while (!env.done()) {
        const aesa::BeamAction a = read_external_action(std::cin);
        aesa::StepResult r = env.step(a);
        trace.episode_return += r.reward.r_total;
        msg = {{"type", "step"},
               {"t", r.info.t},
               {"track_matrix", r.observation.track_matrix},
               {"scan_raster", r.observation.scan_raster},
               {"reward", {{"r_sv", r.reward.r_sv}, {"r_tl", r.reward.r_tl}, {"r_total", r.reward.r_total}}},
               {"done", r.done}};
        std::cout << msg.dump() << std::endl;
        trace.steps.push_back(std::move(r.info));
    }
    return trace;
}

int cmd_run(const std::string& config_path, const std::string& policy, int episodes, std::uint64_t seed,
            const std::string& out_dir, unsigned threads) {
    const aesa::EpisodeConfig base = config_or_default(config_path);
    if (policy != "external") aesa::make_policy(policy);  // reject unknown names before any work
    fs::create_directories(out_dir);

    std::vector<aesa::EpisodeSummary> rows(static_cast<std::size_t>(episodes));
    auto run_one = [&](int k) {
        aesa::EpisodeConfig cfg = base;
        cfg.seed = seed + static_cast<std::uint64_t>(k);
        aesa::EpisodeTrace trace;
        if (policy == "external") {
            trace = run_external_episode(cfg);
        } else {
            auto p = aesa::make_policy(policy);
            trace = aesa::run_episode(cfg, *p);
        }
        write_file_trace(fs::path(out_dir) / trace_name(policy, cfg.seed), trace);
        rows[static_cast<std::size_t>(k)] = aesa::episode_summary(trace);
    };

    if (policy == "external" || threads <= 1) {
        for (int k = 0; k < episodes; ++k) run_one(k);
    } else {
        std::atomic<int> next{0};
        std::mutex err_mu;
        std::exception_ptr first_error;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<unsigned>(threads, static_cast<unsigned>(episodes)); ++w) {
            pool.emplace_back([&] {
                for (int k = next++; k < episodes; k = next++) {
                    try {
                        run_one(k);
                    } catch (...) {
                        std::lock_guard lock(err_mu);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
    write_summaries(out_dir, rows);
    std::cerr << "wrote " << episodes << " traces and summary to " << out_dir << '\n';
    return kOk;
}

int cmd_dataset(const std::string& config_path, const std::string& policy, std::uint64_t samples,
                std::uint64_t seed, bool seed_set, const std::string& out) {
    aesa::EpisodeConfig cfg = config_or_default(config_path);
    if (seed_set) cfg.seed = seed;
    auto teacher = aesa::make_policy(policy);
    aesa::export_bc_dataset(cfg, samples, *teacher, out);
    std::cerr << "wrote " << samples << " records to " << out << '\n';
    return kOk;
}

int cmd_gospa(const std::string& traces_dir, const std::string& out) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(traces_dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    if (files.empty()) throw aesa::IntegrityError("no .jsonl traces in " + traces_dir);

    std::vector<aesa::EpisodeSummary> rows;
    for (const auto& f : files) rows.push_back(aesa::episode_summary(aesa::read_trace_file(f.string())));
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.policy != b.policy ? a.policy < b.policy : a.seed < b.seed;
    });

    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
    }
    std::ostream& os = out.empty() ? std::cout : file;
    os.precision(17);
    aesa::write_summary_csv_header(os);
    for (const auto& r : rows) aesa::write_summary_csv_row(os, r);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AESA search-and-track episode engine"};
    app.require_subcommand(1);

    std::string config_path, policy = "random", out;
    int episodes = 1;
    std::uint64_t seed = 0, samples = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    auto* run = app.add_subcommand("run", "run episodes and write traces plus a summary");
    run->add_option("--config", config_path, "episode config (JSON)")->check(CLI::ExistingFile);
    run->add_option("--policy", policy, "static, random, coverage or external")
        ->check(CLI::IsMember({"static", "random", "coverage", "external"}));
    run->add_option("--episodes", episodes, "number of episodes")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "seed of the first episode; episode k uses seed+k");
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* dataset = app.add_subcommand("dataset", "export (observation, action) pairs for behavior cloning");
    dataset->add_option("--config", config_path, "episode config (JSON)")->check(CLI::ExistingFile);
    dataset->add_option("--samples", samples, "number of records")->required();
    auto* seed_opt = dataset->add_option("--seed", seed, "seed of the first episode");
    dataset->add_option("--policy", policy, "teacher policy")->check(CLI::IsMember({"static", "random", "coverage"}));
    dataset->add_option("--out", out, "output file")->required();

    std::string traces_dir;
    auto* gospa = app.add_subcommand("gospa", "recompute per-episode metrics from trace files");
    gospa->add_option("--traces", traces_dir, "directory of trace files")->required()->check(CLI::ExistingDirectory);
    gospa->add_option("--out", out, "CSV output file (default stdout)");

    auto* defaults = app.add_subcommand("defaults", "print the default config as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, policy, episodes, seed, out, threads);
        if (*dataset) return cmd_dataset(config_path, policy, samples, seed, seed_opt->count() > 0, out);
        if (*gospa) return cmd_gospa(traces_dir, out);
        if (*defaults) {
            std::cout << aesa::config_to_json(aesa::EpisodeConfig{}).dump(2) << '\n';
            return kOk;
        }
    } catch (const aesa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigFailure;
    } catch (const aesa::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
