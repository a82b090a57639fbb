#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "rsme/densefilter.hpp"
#include "rsme/matrix.hpp"
#include "rsme/mom.hpp"
#include "rsme/sampling.hpp"
#include "rsme/subgm.hpp"

namespace rsme {

namespace estimator {

struct Stage1Only {};
struct Full {
    DenseEstimator dense = dense::IterativeFilter{};
};
struct CoordMoMBaseline {
    SubgroupRule rule = SubgroupRule::practical();
};
struct ConvexBaseline {
    double eta = 0.05;
    std::size_t iterations = 200;
};
// Coordinate-wise MoM on the uncorrupted rows; simulation only.
struct Oracle {};

} // namespace estimator

using EstimatorKind = std::variant<estimator::Stage1Only, estimator::Full, estimator::CoordMoMBaseline,
                                   estimator::ConvexBaseline, estimator::Oracle>;

struct EstimatorOutput {
    Vector estimate;
    IndexSet support;
    std::optional<Trace> trace;
};

/// Runs one estimator. Stage 1 supplies the support for Stage1Only and Full;
/// estimators without a selection step report {i : |estimate_i| >= multiplier * alpha}.
EstimatorOutput run_estimator(const SampleMatrix& samples, const EstimatorKind& kind, const SubgroupRule& mom_rule,
                              const SubgmConfig& subgm_cfg, double epsilon, std::uint64_t seed,
                              Backend backend = Backend::Parallel);

struct Metrics {
    double l2_error = 0.0;
    double linf_error = 0.0;
    double success_rate = 1.0;
};

/// Jaccard index of two sorted index sets; 1 when both are empty.
double jaccard(const IndexSet& a, const IndexSet& b);

Metrics evaluate(const Vector& estimate, const IndexSet& support, const SparseMeanSpec& truth);

/// Full report for one run, timed.
struct EstimateReport {
    Vector estimate;
    IndexSet support;
    Metrics metrics;
    double wall_time_seconds = 0.0;
    std::optional<Trace> trace;
};

EstimateReport estimate_and_evaluate(const SampleMatrix& samples, const EstimatorKind& kind,
                                     const SubgroupRule& mom_rule, const SubgmConfig& subgm_cfg, double epsilon,
                                     std::uint64_t seed, const SparseMeanSpec& truth,
                                     Backend backend = Backend::Parallel);

} // namespace rsme
