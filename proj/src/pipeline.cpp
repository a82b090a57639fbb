#include "rsme/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>

namespace rsme {

namespace {

EstimatorOutput stage1(const SampleMatrix& samples, const SubgroupRule& rule, const SubgmConfig& cfg, double epsilon,
                       Backend backend) {
    const SubgroupPlan plan = make_plan(samples.rows(), rule, epsilon);
    const SubgroupMeans means = subgroup_means(samples, plan, backend);
    SubgmResult run = subgm_run(means, cfg, backend);
    EstimatorOutput out;
    out.estimate = run.iterate.estimate();
    out.support = identify_support(out.estimate, cfg.alpha, cfg.support_multiplier);
    if (!run.trace.empty()) {
        out.trace = std::move(run.trace);
    }
    return out;
}

SampleMatrix clean_rows(const SampleMatrix& samples) {
    const IndexSet& bad = samples.corrupted_rows();
    const std::size_t d = samples.cols();
    std::vector<double> data;
    data.reserve((samples.rows() - bad.size()) * d);
    std::size_t next = 0;
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        if (next < bad.size() && bad[next] == r) {
            ++next;
            continue;
        }
        const auto row = samples.row(r);
        data.insert(data.end(), row.begin(), row.end());
    }
    const std::size_t kept = samples.rows() - bad.size();
    return SampleMatrix(kept, d, std::move(data));
}

} // namespace

EstimatorOutput run_estimator(const SampleMatrix& samples, const EstimatorKind& kind, const SubgroupRule& mom_rule,
                              const SubgmConfig& subgm_cfg, double epsilon, std::uint64_t seed, Backend backend) {
    if (samples.rows() == 0 || samples.cols() == 0) {
        throw ShapeError("run_estimator: empty sample matrix");
    }
    subgm_cfg.validate();
    const std::size_t d = samples.cols();

    auto dense_support = [&](EstimatorOutput out) {
        out.support = identify_support(out.estimate, subgm_cfg.alpha, subgm_cfg.support_multiplier);
        return out;
    };

    return std::visit(
        [&](const auto& k) -> EstimatorOutput {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, estimator::Stage1Only>) {
                return stage1(samples, mom_rule, subgm_cfg, epsilon, backend);
            } else if constexpr (std::is_same_v<K, estimator::Full>) {
                EstimatorOutput first = stage1(samples, mom_rule, subgm_cfg, epsilon, backend);
                if (first.support.empty()) {
                    first.estimate.assign(d, 0.0);
                    return first;
                }
                const SampleMatrix projected = project_to_support(samples, first.support);
                const Vector dense = dense_robust_mean(projected, epsilon, k.dense, seed);
                first.estimate = assemble_full_estimate(first.support, dense, d);
                return first;
            } else if constexpr (std::is_same_v<K, estimator::CoordMoMBaseline>) {
                const SubgroupPlan plan = make_plan(samples.rows(), k.rule, epsilon);
                return dense_support({mom_coordinatewise(subgroup_means(samples, plan, backend)), {}, {}});
            } else if constexpr (std::is_same_v<K, estimator::ConvexBaseline>) {
                const SubgroupPlan plan = make_plan(samples.rows(), mom_rule, epsilon);
                ConvexResult run = convex_baseline_run(subgroup_means(samples, plan, backend), k.eta, k.iterations,
                                                       subgm_cfg.trace, backend);
                EstimatorOutput out = dense_support({std::move(run.estimate), {}, {}});
                if (!run.trace.empty()) {
                    out.trace = std::move(run.trace);
                }
                return out;
            } else {
                if (samples.corrupted_rows().empty() && epsilon > 0.0) {
                    throw StateError("oracle estimator needs the corrupted-row record of the samples");
                }
                const SampleMatrix clean = clean_rows(samples);
                const SubgroupPlan plan = make_plan(clean.rows(), SubgroupRule::practical(), epsilon);
                return dense_support({mom_coordinatewise(subgroup_means(clean, plan, backend)), {}, {}});
            }
        },
        kind);
}

double jaccard(const IndexSet& a, const IndexSet& b) {
    IndexSet both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    const std::size_t either = a.size() + b.size() - both.size();
    if (either == 0) {
        return 1.0;
    }
    return static_cast<double>(both.size()) / static_cast<double>(either);
}

Metrics evaluate(const Vector& estimate, const IndexSet& support, const SparseMeanSpec& truth) {
    if (estimate.size() != truth.dimension) {
        throw ShapeError("evaluate: estimate and truth differ in dimension");
    }
    const Vector target = dense_mean(truth);
    Metrics m;
    double sq = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double diff = std::abs(estimate[i] - target[i]);
        sq += diff * diff;
        m.linf_error = std::max(m.linf_error, diff);
    }
    m.l2_error = std::sqrt(sq);
    m.success_rate = jaccard(support, truth.support());
    return m;
}

EstimateReport estimate_and_evaluate(const SampleMatrix& samples, const EstimatorKind& kind,
                                     const SubgroupRule& mom_rule, const SubgmConfig& subgm_cfg, double epsilon,
                                     std::uint64_t seed, const SparseMeanSpec& truth, Backend backend) {
    const auto start = std::chrono::steady_clock::now();
    EstimatorOutput out = run_estimator(samples, kind, mom_rule, subgm_cfg, epsilon, seed, backend);
    const auto stop = std::chrono::steady_clock::now();
    EstimateReport report;
    report.metrics = evaluate(out.estimate, out.support, truth);
    report.estimate = std::move(out.estimate);
    report.support = std::move(out.support);
    report.trace = std::move(out.trace);
    report.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
    return report;
}

} // namespace rsme
