#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsme/contamination.hpp"
#include "rsme/densefilter.hpp"
#include "rsme/mom.hpp"
#include "rsme/pipeline.hpp"
#include "rsme/sampling.hpp"

namespace rsme {

/// Malformed or invalid experiment config. The message carries the line
/// number and/or section.key that caused it.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { None, Epsilon, K, TailParam, N, D };

std::string axis_name(SweepAxis axis);

enum class ContaminationKind { None, ConstantBias, HeavyTail, PointMass, LowerBound };

struct ContaminationConfig {
    ContaminationKind kind = ContaminationKind::None;
    double epsilon = 0.1;
    std::optional<double> shift;       // constant_bias; nullopt = sigma / sqrt(epsilon)
    double location = 20.0;            // heavy_tail
    double scale = 7.0710678118654755; // heavy_tail
    std::vector<double> value;         // point_mass: one entry (broadcast) or d entries
    std::optional<double> sigma;       // lower_bound and shift=auto; nullopt = inlier sd
    std::size_t support_index = 0;     // lower_bound
};

struct MeanConfig {
    std::size_t dimension = 100;
    std::vector<double> values; // explicit leading nonzeros, or
    std::size_t k = 0;          // k copies of fill_value
    double fill_value = 2.0;
};

struct EstimatorEntry {
    std::string name;
    EstimatorKind kind;
    bool uses_full_iterations = false; // SubGM T for this estimator: iterations_full vs iterations_stage1
};

// Known estimator labels: stage_1, full_filter, full_mom, coord_mom, convex, oracle.
std::vector<std::string> estimator_names();

struct ExperimentConfig {
    InlierDistribution distribution = InlierDistribution::fisk(3.1);
    MeanConfig mean;
    std::optional<std::size_t> n = 600;
    std::optional<std::size_t> n_per_k;
    ContaminationConfig contamination;
    std::vector<EstimatorEntry> estimators;

    double alpha = 1e-5;
    double eta = 0.05;
    std::optional<std::size_t> iterations_stage1 = 600; // nullopt = auto window
    std::optional<std::size_t> iterations_full = 200;
    double support_multiplier = 1.0;
    SubgroupRule subgroup_rule = SubgroupRule::practical();
    double convex_eta = 0.05;
    std::size_t convex_iterations = 600;
    dense::IterativeFilter filter;
    enum class Sigma2Source { Known, Estimate, Value } filter_sigma2_source = Sigma2Source::Known;
    double filter_sigma2_value = 1.0;

    SweepAxis sweep_axis = SweepAxis::None;
    std::vector<double> sweep_values;

    std::size_t trials = 1;
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";

    IndexSet trace_coordinates;
    std::size_t trace_stride = 1;
    std::optional<std::size_t> trace_iterations; // default: iterations_stage1

    std::vector<std::size_t> bench_d_values;
    std::size_t bench_repeats = 3;
    Backend bench_backend = Backend::Serial;

    std::size_t sweep_points() const { return sweep_values.empty() ? 1 : sweep_values.size(); }
    std::size_t planned_runs() const { return sweep_points() * trials * estimators.size(); }
};

/// One fully resolved point of the sweep grid.
struct Scenario {
    double sweep_value = 0.0;
    InlierDistribution distribution;
    SparseMeanSpec mean;
    std::size_t n = 0;
    double epsilon = 0.0;
    ContaminationSpec contamination;
    SubgmConfig stage1;
    SubgmConfig full;
    std::optional<double> filter_sigma2;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Scenario materialize(const ExperimentConfig& cfg, std::size_t sweep_index);

/// EstimatorKind for one configured estimator at a scenario (fills filter sigma2).
EstimatorKind resolve_estimator(const EstimatorEntry& entry, const Scenario& scenario);

} // namespace rsme
