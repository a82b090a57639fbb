#include "rsme/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <exception>
#include <mutex>

#include <json.hpp>

#include "rsme/rng.hpp"

namespace rsme {

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t sweep_index, std::size_t trial) {
    return derive_seed(base_seed, {hash_name("trial"), sweep_index, trial});
}

SampleMatrix trial_samples(const Scenario& scenario, std::uint64_t seed, Backend backend) {
    const SampleMatrix clean = sample_inliers(scenario.distribution, scenario.mean, scenario.n,
                                              derive_seed(seed, {hash_name("inliers")}), backend);
    return apply_contamination(clean, scenario.contamination, derive_seed(seed, {hash_name("contamination")}));
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_result_row(const ExperimentConfig& cfg, const ResultRow& row) {
    std::string line;
    line += axis_name(cfg.sweep_axis);
    line += ',' + format_double(row.sweep_value);
    line += ',' + row.estimator;
    line += ',' + std::to_string(row.trial);
    line += ',' + std::to_string(row.seed);
    line += ',' + format_double(row.l2_error);
    line += ',' + format_double(row.linf_error);
    line += ',' + format_double(row.success_rate);
    line += ',' + std::to_string(row.support_size);
    return line;
}

namespace {

void write_checked(std::ostream* out, const std::string& text) {
    if (out == nullptr) {
        return;
    }
    *out << text;
    if (!*out) {
        throw IoError("failed writing experiment output");
    }
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, const Scenario& sc, std::size_t sweep_index,
                                 std::size_t trial) {
    const std::uint64_t seed = trial_seed(cfg.base_seed, sweep_index, trial);
    const SampleMatrix samples = trial_samples(sc, seed);
    std::vector<ResultRow> rows;
    rows.reserve(cfg.estimators.size());
    for (const auto& entry : cfg.estimators) {
        const EstimateReport report = estimate_and_evaluate(
            samples, resolve_estimator(entry, sc), cfg.subgroup_rule, entry.uses_full_iterations ? sc.full : sc.stage1,
            sc.epsilon, derive_seed(seed, {hash_name(entry.name)}), sc.mean, Backend::Serial);
        ResultRow row;
        row.sweep_index = sweep_index;
        row.sweep_value = sc.sweep_value;
        row.estimator = entry.name;
        row.trial = trial;
        row.seed = seed;
        row.l2_error = report.metrics.l2_error;
        row.linf_error = report.metrics.linf_error;
        row.success_rate = report.metrics.success_rate;
        row.support_size = report.support.size();
        row.wall_time_ms = report.wall_time_seconds * 1e3;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    const std::size_t points = cfg.sweep_points();
    const std::size_t trials = cfg.trials;
    const std::size_t estimators = cfg.estimators.size();
    std::vector<Scenario> scenarios;
    scenarios.reserve(points);
    for (std::size_t s = 0; s < points; ++s) {
        scenarios.push_back(materialize(cfg, s));
    }

    std::vector<std::vector<ResultRow>> by_task(points * trials);
    std::vector<std::size_t> finished(points, 0);
    std::size_t next_flush = 0;
    std::size_t rows_written = 0;
    std::mutex writer;
    std::exception_ptr failure;

    write_checked(options.results, std::string(kResultsHeader) + "\n");
    write_checked(options.timings, std::string(kTimingsHeader) + "\n");

    // Emits every sweep point whose trials are all done, in order. Caller holds `writer`.
    auto flush_ready = [&] {
        while (next_flush < points && finished[next_flush] == trials) {
            std::string results;
            std::string timings;
            for (std::size_t e = 0; e < estimators; ++e) {
                for (std::size_t t = 0; t < trials; ++t) {
                    const ResultRow& row = by_task[next_flush * trials + t][e];
                    results += format_result_row(cfg, row) + "\n";
                    timings += format_double(row.sweep_value) + "," + row.estimator + "," + std::to_string(row.trial) +
                               "," + format_double(row.wall_time_ms) + "\n";
                    ++rows_written;
                }
            }
            write_checked(options.results, results);
            write_checked(options.timings, timings);
            ++next_flush;
        }
    };

    const auto tasks = static_cast<std::ptrdiff_t>(points * trials);
    const int threads = std::max(1, options.threads);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t task = 0; task < tasks; ++task) {
        {
            std::lock_guard<std::mutex> lock(writer);
            if (failure) continue;
        }
        const std::size_t s = static_cast<std::size_t>(task) / trials;
        const std::size_t t = static_cast<std::size_t>(task) % trials;
        try {
            std::vector<ResultRow> rows = run_trial(cfg, scenarios[s], s, t);
            std::lock_guard<std::mutex> lock(writer);
            by_task[static_cast<std::size_t>(task)] = std::move(rows);
            ++finished[s];
            flush_ready();
        } catch (...) {
            std::lock_guard<std::mutex> lock(writer);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    write_checked(options.results, "# end rows=" + std::to_string(rows_written) + "\n");
    write_checked(options.timings, "# end rows=" + std::to_string(rows_written) + "\n");
    if (options.results != nullptr) options.results->flush();

    std::vector<ResultRow> out;
    out.reserve(points * trials * estimators);
    for (std::size_t s = 0; s < points; ++s) {
        for (std::size_t e = 0; e < estimators; ++e) {
            for (std::size_t t = 0; t < trials; ++t) {
                out.push_back(by_task[s * trials + t][e]);
            }
        }
    }
    return out;
}

namespace {

void emit_trace(std::ostream& out, const char* method, const Trace& trace) {
    for (const auto& rec : trace.records) {
        for (std::size_t c = 0; c < trace.coordinates.size(); ++c) {
            out << method << ',' << rec.t << ',' << trace.coordinates[c] << ',' << format_double(rec.value[c]) << ','
                << format_double(rec.beta[c]) << '\n';
        }
    }
}

} // namespace

void run_trace(const ExperimentConfig& cfg, const IndexSet& coordinates, std::ostream& out) {
    const Scenario sc = materialize(cfg, 0);
    for (std::size_t c : coordinates) {
        if (c >= sc.mean.dimension) {
            throw ParameterError("trace: coordinate " + std::to_string(c) + " out of range (d=" +
                                 std::to_string(sc.mean.dimension) + ")");
        }
    }
    const SampleMatrix samples = trial_samples(sc, trial_seed(cfg.base_seed, 0, 0), Backend::Parallel);
    const SubgroupMeans means = subgroup_means(samples, make_plan(sc.n, cfg.subgroup_rule, sc.epsilon));
    const std::size_t T = cfg.trace_iterations ? *cfg.trace_iterations : sc.stage1.resolved_iterations();
    const TraceOptions opts{cfg.trace_stride, coordinates};

    out << kTraceHeader << '\n';
    if (T == 0) {
        // Only the initial point: u = v = alpha, so u^2 - v^2 = 0.
        Trace init;
        init.coordinates = coordinates;
        if (init.coordinates.empty()) {
            for (std::size_t i = 0; i < sc.mean.dimension; ++i) init.coordinates.push_back(i);
        }
        const Vector zero(sc.mean.dimension, 0.0);
        const Vector beta = sign_statistic(means, zero);
        Trace::Record rec{0, {}, {}};
        for (std::size_t c : init.coordinates) {
            rec.value.push_back(0.0);
            rec.beta.push_back(beta[c]);
        }
        init.records.push_back(rec);
        emit_trace(out, "ncvx", init);
        emit_trace(out, "cvx", init);
    } else {
        SubgmConfig scfg = sc.stage1;
        scfg.iterations = T;
        scfg.trace = opts;
        emit_trace(out, "ncvx", subgm_run(means, scfg).trace);
        emit_trace(out, "cvx", convex_baseline_run(means, cfg.convex_eta, T, opts).trace);
    }
    if (!out) {
        throw IoError("failed writing trace output");
    }
}

std::vector<BenchRow> run_bench(const std::vector<std::size_t>& d_values, const ExperimentConfig& cfg,
                                std::ostream* out) {
    for (std::size_t i = 1; i < d_values.size(); ++i) {
        if (d_values[i] <= d_values[i - 1]) {
            throw ParameterError("bench: d values must be strictly ascending");
        }
    }
    std::vector<BenchRow> rows;
    write_checked(out, std::string(kBenchHeader) + "\n");
    for (std::size_t d : d_values) {
        ExperimentConfig local = cfg;
        local.sweep_axis = SweepAxis::None;
        local.sweep_values.clear();
        local.mean.dimension = d;
        const Scenario sc = materialize(local, 0);
        const std::uint64_t seed = trial_seed(cfg.base_seed, 0, 0);
        const SampleMatrix samples = trial_samples(sc, seed, cfg.bench_backend);

        struct Job {
            const char* name;
            EstimatorKind kind;
            SubgmConfig subgm;
        };
        EstimatorEntry filter_entry{"full_filter", estimator::Full{cfg.filter}, true};
        const Job jobs[] = {{"stage_1", estimator::Stage1Only{}, sc.stage1},
                            {"full_filter", resolve_estimator(filter_entry, sc), sc.full}};
        for (const Job& job : jobs) {
            std::vector<double> times;
            for (std::size_t r = 0; r < cfg.bench_repeats; ++r) {
                const auto start = std::chrono::steady_clock::now();
                const EstimatorOutput result =
                    run_estimator(samples, job.kind, cfg.subgroup_rule, job.subgm, sc.epsilon, seed, cfg.bench_backend);
                const auto stop = std::chrono::steady_clock::now();
                if (result.estimate.size() != d) {
                    throw NumericError("bench: estimator returned a wrong-sized estimate");
                }
                times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
            }
            std::sort(times.begin(), times.end());
            BenchRow row{d, job.name, sc.n, job.subgm.resolved_iterations(), cfg.bench_repeats,
                         times[times.size() / 2]};
            write_checked(out, std::to_string(row.d) + "," + row.estimator + "," + std::to_string(row.n) + "," +
                                   std::to_string(row.iterations) + "," + std::to_string(row.repeats) + "," +
                                   format_double(row.wall_time_ms) + "\n");
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string manifest_json(const ExperimentConfig& cfg, const std::string& command) {
    using nlohmann::json;
    json j;
    j["library"] = "rsme";
    j["version"] = RSME_VERSION;
    j["command"] = command;
    j["results_schema"] = kResultsSchema;
    j["columns"] = {{"results", kResultsHeader}, {"timings", kTimingsHeader}, {"trace", kTraceHeader},
                    {"bench", kBenchHeader}};

    json dist;
    dist["family"] = family_name(cfg.distribution.family);
    dist["param"] = cfg.distribution.param;
    j["distribution"] = dist;

    json mean;
    mean["dimension"] = cfg.mean.dimension;
    if (!cfg.mean.values.empty()) {
        mean["values"] = cfg.mean.values;
    } else {
        mean["k"] = cfg.mean.k;
        mean["value"] = cfg.mean.fill_value;
    }
    j["mean"] = mean;

    json samples;
    if (cfg.n) samples["n"] = *cfg.n;
    if (cfg.n_per_k) samples["n_per_k"] = *cfg.n_per_k;
    j["samples"] = samples;

    const auto& c = cfg.contamination;
    static const char* kinds[] = {"none", "constant_bias", "heavy_tail", "point_mass", "lower_bound"};
    json cont;
    cont["strategy"] = kinds[static_cast<int>(c.kind)];
    cont["epsilon"] = c.epsilon;
    cont["shift"] = c.shift ? json(*c.shift) : json("auto");
    cont["location"] = c.location;
    cont["scale"] = c.scale;
    cont["value"] = c.value;
    cont["sigma"] = c.sigma ? json(*c.sigma) : json("inlier");
    cont["support_index"] = c.support_index;
    j["contamination"] = cont;

    json names = json::array();
    for (const auto& e : cfg.estimators) names.push_back(e.name);
    j["estimators"] = names;

    auto iterations = [](const std::optional<std::size_t>& t) { return t ? json(*t) : json("auto"); };
    json hyper;
    hyper["alpha"] = cfg.alpha;
    hyper["eta"] = cfg.eta;
    hyper["iterations_stage1"] = iterations(cfg.iterations_stage1);
    hyper["iterations_full"] = iterations(cfg.iterations_full);
    hyper["support_multiplier"] = cfg.support_multiplier;
    hyper["subgroup_rule"] = cfg.subgroup_rule.describe();
    hyper["convex_eta"] = cfg.convex_eta;
    hyper["convex_iterations"] = cfg.convex_iterations;
    hyper["filter_rounds"] = cfg.filter.max_rounds;
    hyper["filter_quantile"] = cfg.filter.score_quantile ? json(*cfg.filter.score_quantile) : json("auto");
    hyper["filter_factor"] = cfg.filter.threshold_factor;
    static const char* sources[] = {"known", "estimate", "value"};
    hyper["filter_sigma2"] = sources[static_cast<int>(cfg.filter_sigma2_source)];
    if (cfg.filter_sigma2_source == ExperimentConfig::Sigma2Source::Value) {
        hyper["filter_sigma2_value"] = cfg.filter_sigma2_value;
    }
    j["hyper"] = hyper;

    j["sweep"] = {{"axis", axis_name(cfg.sweep_axis)}, {"values", cfg.sweep_values}};
    j["run"] = {{"trials", cfg.trials}, {"base_seed", cfg.base_seed}, {"planned_runs", cfg.planned_runs()}};
    return j.dump(2) + "\n";
}

} // namespace rsme
