#include "rsme/subgm.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace rsme {

void SubgmConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("subgm: alpha must be positive");
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw ParameterError("subgm: eta must be positive");
    }
    if (iterations && *iterations == 0) {
        throw ParameterError("subgm: iteration count must be positive");
    }
    if (!(support_multiplier >= 1.0)) {
        throw ParameterError("subgm: support multiplier must be >= 1");
    }
}

std::size_t SubgmConfig::resolved_iterations() const {
    if (iterations) {
        return *iterations;
    }
    return static_cast<std::size_t>(std::ceil(2.0 / eta * std::log(1.0 / alpha)));
}

FactoredIterate FactoredIterate::initial(std::size_t d, double alpha) {
    return {Vector(d, alpha), Vector(d, alpha), 0};
}

Vector FactoredIterate::estimate() const {
    Vector mu(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        mu[i] = u[i] * u[i] - v[i] * v[i];
    }
    return mu;
}

namespace {

void require_finite(const FactoredIterate& it, const char* where) {
    for (std::size_t i = 0; i < it.u.size(); ++i) {
        if (!std::isfinite(it.u[i]) || !std::isfinite(it.v[i])) {
            throw NumericError(std::string(where) + ": non-finite factor at coordinate " + std::to_string(i) +
                               ", iteration " + std::to_string(it.t));
        }
    }
}

IndexSet trace_coordinates(const TraceOptions& opts, std::size_t d) {
    if (opts.coordinates.empty()) {
        IndexSet all(d);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    for (std::size_t c : opts.coordinates) {
        if (c >= d) {
            throw ParameterError("trace: coordinate " + std::to_string(c) + " out of range");
        }
    }
    return opts.coordinates;
}

void record(Trace& trace, std::size_t t, const Vector& value, const Vector& beta) {
    Trace::Record rec{t, {}, {}};
    rec.value.reserve(trace.coordinates.size());
    rec.beta.reserve(trace.coordinates.size());
    for (std::size_t c : trace.coordinates) {
        rec.value.push_back(value[c]);
        rec.beta.push_back(beta[c]);
    }
    trace.records.push_back(std::move(rec));
}

bool due(const TraceOptions& opts, std::size_t t, std::size_t last) {
    return opts.stride > 0 && (t % opts.stride == 0 || t == last);
}

} // namespace

FactoredIterate subgm_step(const FactoredIterate& iter, const SubgroupMeans& means, double eta, Backend backend) {
    if (iter.u.size() != means.dimension() || iter.v.size() != means.dimension()) {
        throw ShapeError("subgm_step: iterate and subgroup means differ in dimension");
    }
    require_finite(iter, "subgm_step");
    FactoredIterate next = iter;
    Vector beta(iter.u.size());
    kernels::subgm_update(backend, means.raw(), means.groups(), next.u, next.v, beta, eta);
    ++next.t;
    require_finite(next, "subgm_step");
    return next;
}

SubgmResult subgm_run(const SubgroupMeans& means, const SubgmConfig& cfg, Backend backend) {
    cfg.validate();
    const std::size_t d = means.dimension();
    const std::size_t T = cfg.resolved_iterations();
    SubgmResult result{FactoredIterate::initial(d, cfg.alpha), {}};
    FactoredIterate& it = result.iterate;
    Vector beta(d);
    const bool tracing = cfg.trace.stride > 0;
    if (tracing) {
        result.trace.coordinates = trace_coordinates(cfg.trace, d);
    }

    for (std::size_t t = 0; t < T; ++t) {
        Vector before;
        if (due(cfg.trace, t, T)) {
            before = it.estimate();
        }
        kernels::subgm_update(backend, means.raw(), means.groups(), it.u, it.v, beta, cfg.eta);
        ++it.t;
        require_finite(it, "subgm_run");
        if (!before.empty()) {
            record(result.trace, t, before, beta);
        }
    }
    if (tracing) {
        const Vector mu = it.estimate();
        record(result.trace, T, mu, sign_statistic(means, mu, backend));
    }
    return result;
}

IndexSet identify_support(const Vector& estimate, double alpha, double multiplier) {
    if (!(alpha > 0.0)) {
        throw ParameterError("identify_support: alpha must be positive");
    }
    const double threshold = multiplier * alpha;
    IndexSet support;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        if (std::abs(estimate[i]) >= threshold) {
            support.push_back(i);
        }
    }
    return support;
}

double ncvx_objective(const SubgroupMeans& means, const Vector& u, const Vector& v) {
    if (u.size() != means.dimension() || v.size() != means.dimension()) {
        throw ShapeError("ncvx_objective: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double mu = u[i] * u[i] - v[i] * v[i];
        for (double m : means.column(i)) {
            total += std::abs(m - mu);
        }
    }
    return total / (2.0 * static_cast<double>(means.groups()));
}

ConvexResult convex_baseline_run(const SubgroupMeans& means, double eta, std::size_t iterations,
                                 const TraceOptions& trace, Backend backend) {
    if (!(eta > 0.0)) {
        throw ParameterError("convex_baseline_run: eta must be positive");
    }
    const std::size_t d = means.dimension();
    ConvexResult result{Vector(d, 0.0), {}};
    Vector beta(d);
    const bool tracing = trace.stride > 0;
    if (tracing) {
        result.trace.coordinates = trace_coordinates(trace, d);
    }
    for (std::size_t t = 0; t < iterations; ++t) {
        Vector before;
        if (due(trace, t, iterations)) {
            before = result.estimate;
        }
        kernels::convex_update(backend, means.raw(), means.groups(), result.estimate, beta, eta);
        if (!before.empty()) {
            record(result.trace, t, before, beta);
        }
    }
    if (tracing) {
        record(result.trace, iterations, result.estimate, sign_statistic(means, result.estimate, backend));
    }
    return result;
}

} // namespace rsme
