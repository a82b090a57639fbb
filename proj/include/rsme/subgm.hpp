#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rsme/kernels.hpp"
#include "rsme/matrix.hpp"
#include "rsme/mom.hpp"

namespace rsme {

/// What to record while iterating. stride == 0 disables tracing; an empty
/// coordinate list records every coordinate.
struct TraceOptions {
    std::size_t stride = 0;
    IndexSet coordinates;
};

/// Per-iteration snapshots of the estimate and of beta for a coordinate subset.
struct Trace {
    struct Record {
        std::size_t t = 0;
        Vector value; // estimate at iteration t, restricted to `coordinates`
        Vector beta;  // sign statistic evaluated at that estimate
    };
    IndexSet coordinates;
    std::vector<Record> records;

    bool empty() const { return records.empty(); }
};

struct SubgmConfig {
    double alpha = 1e-5;
    double eta = 0.05;
    std::optional<std::size_t> iterations; // nullopt: the lower end of the window, ceil(2/eta * ln(1/alpha))
    double support_multiplier = 1.0;
    TraceOptions trace;

    void validate() const;
    std::size_t resolved_iterations() const;
};

/// The pair (u, v) with estimate u^2 - v^2.
struct FactoredIterate {
    Vector u;
    Vector v;
    std::size_t t = 0;

    static FactoredIterate initial(std::size_t d, double alpha);
    Vector estimate() const;
};

FactoredIterate subgm_step(const FactoredIterate& iter, const SubgroupMeans& means, double eta,
                           Backend backend = Backend::Parallel);

struct SubgmResult {
    FactoredIterate iterate;
    Trace trace;
};

/// Runs SubGM from u = v = alpha * 1 for the configured number of steps.
/// Throws NumericError naming the coordinate and iteration if a factor
/// stops being finite.
SubgmResult subgm_run(const SubgroupMeans& means, const SubgmConfig& cfg, Backend backend = Backend::Parallel);

/// { i : |estimate_i| >= multiplier * alpha }.
IndexSet identify_support(const Vector& estimate, double alpha, double multiplier = 1.0);

/// (1/2J) sum_j ||mean_j - (u^2 - v^2)||_1.
double ncvx_objective(const SubgroupMeans& means, const Vector& u, const Vector& v);

struct ConvexResult {
    Vector estimate;
    Trace trace;
};

/// Subgradient descent on the convex l1 loss from zero:
/// mu(t+1) = mu(t) + eta * beta(mu(t)).
ConvexResult convex_baseline_run(const SubgroupMeans& means, double eta, std::size_t iterations,
                                 const TraceOptions& trace = {}, Backend backend = Backend::Parallel);

} // namespace rsme
