// rsme: experiment runner for robust sparse mean estimation.
//
//   rsme run      --config PATH [--out DIR] [--threads N] [--seed U64]
//   rsme trace    --config PATH [--out DIR] [--seed U64] [--coords 0,1,2]
//   rsme bench    --config PATH [--out DIR] [--seed U64] [--d 500,1000,2000]
//   rsme validate --config PATH
//
// Exit codes: 0 success, 2 config error, 3 runtime error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsme/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Common {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool with_outputs = true) {
    cmd->add_option("--config", c.config, "experiment config file")->required();
    if (with_outputs) {
        cmd->add_option("--out", c.out, "output directory (overrides run.output)");
        cmd->add_option("--seed", c.seed, "base seed (overrides run.base_seed)");
    }
}

rsme::ExperimentConfig load(const Common& c) {
    rsme::ExperimentConfig cfg = rsme::load_config(c.config);
    if (c.out) cfg.output_dir = *c.out;
    if (c.seed) cfg.base_seed = *c.seed;
    return cfg;
}

fs::path prepare_dir(const rsme::ExperimentConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw rsme::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw rsme::IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

void write_manifest(const fs::path& dir, const rsme::ExperimentConfig& cfg, const std::string& command) {
    auto out = open_out(dir / "manifest.json");
    out << rsme::manifest_json(cfg, command);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust sparse mean estimation experiments"};
    app.require_subcommand(1);

    Common run_opts, trace_opts, bench_opts, validate_opts;
    int threads = 1;
    std::vector<std::size_t> coords;
    std::vector<std::size_t> d_values;

    auto* run = app.add_subcommand("run", "run the configured trial grid, write results.csv");
    add_common(run, run_opts);
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* trace = app.add_subcommand("trace", "write SubGM and convex trajectories to trace.csv");
    add_common(trace, trace_opts);
    trace->add_option("--coords", coords, "coordinates to record (default: trace.coordinates)")->delimiter(',');

    auto* bench = app.add_subcommand("bench", "time stage_1 and full_filter versus dimension, write bench.csv");
    add_common(bench, bench_opts);
    bench->add_option("--d", d_values, "dimensions (default: bench.d_values)")->delimiter(',');

    auto* validate = app.add_subcommand("validate", "parse and check a config");
    add_common(validate, validate_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*validate) {
            const auto cfg = load(validate_opts);
            std::cout << "ok: " << cfg.sweep_points() << " sweep point(s) x " << cfg.trials << " trial(s) x "
                      << cfg.estimators.size() << " estimator(s) = " << cfg.planned_runs() << " planned runs\n";
            return 0;
        }
        if (*run) {
            const auto cfg = load(run_opts);
            const fs::path dir = prepare_dir(cfg);
            write_manifest(dir, cfg, "run");
            auto results = open_out(dir / "results.csv");
            auto timings = open_out(dir / "timings.csv");
            const auto rows = rsme::run_experiment(cfg, {threads, &results, &timings});
            std::cout << "wrote " << rows.size() << " rows to " << (dir / "results.csv").string() << "\n";
            return 0;
        }
        if (*trace) {
            const auto cfg = load(trace_opts);
            const fs::path dir = prepare_dir(cfg);
            write_manifest(dir, cfg, "trace");
            auto out = open_out(dir / "trace.csv");
            rsme::run_trace(cfg, coords.empty() ? cfg.trace_coordinates : rsme::IndexSet(coords), out);
            std::cout << "wrote " << (dir / "trace.csv").string() << "\n";
            return 0;
        }
        if (*bench) {
            const auto cfg = load(bench_opts);
            const fs::path dir = prepare_dir(cfg);
            write_manifest(dir, cfg, "bench");
            auto out = open_out(dir / "bench.csv");
            const auto rows = rsme::run_bench(d_values.empty() ? cfg.bench_d_values : d_values, cfg, &out);
            std::cout << "wrote " << rows.size() << " rows to " << (dir / "bench.csv").string() << "\n";
            return 0;
        }
    } catch (const rsme::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
