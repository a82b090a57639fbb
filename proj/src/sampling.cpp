#include "rsme/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace rsme {

void SparseMeanSpec::validate() const {
    if (dimension == 0) {
        throw ParameterError("sparse mean: dimension must be positive");
    }
    std::set<std::size_t> seen;
    for (const auto& [index, value] : entries) {
        if (index >= dimension) {
            throw ParameterError("sparse mean: index " + std::to_string(index) + " out of range");
        }
        if (!seen.insert(index).second) {
            throw ParameterError("sparse mean: duplicate index " + std::to_string(index));
        }
        if (value == 0.0 || !std::isfinite(value)) {
            throw ParameterError("sparse mean: entry at index " + std::to_string(index) + " must be finite and nonzero");
        }
    }
}

IndexSet SparseMeanSpec::support() const {
    IndexSet s;
    s.reserve(entries.size());
    for (const auto& e : entries) {
        s.push_back(e.first);
    }
    std::sort(s.begin(), s.end());
    return s;
}

double SparseMeanSpec::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries) {
        m = std::max(m, std::abs(e.second));
    }
    return m;
}

double SparseMeanSpec::min_abs() const {
    if (entries.empty()) {
        return 0.0;
    }
    double m = std::abs(entries.front().second);
    for (const auto& e : entries) {
        m = std::min(m, std::abs(e.second));
    }
    return m;
}

SparseMeanSpec SparseMeanSpec::leading(std::size_t dimension, std::size_t k, double value) {
    SparseMeanSpec spec{dimension, {}};
    for (std::size_t i = 0; i < k; ++i) {
        spec.entries.emplace_back(i, value);
    }
    spec.validate();
    return spec;
}

SparseMeanSpec SparseMeanSpec::leading(std::size_t dimension, const std::vector<double>& values) {
    SparseMeanSpec spec{dimension, {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        spec.entries.emplace_back(i, values[i]);
    }
    spec.validate();
    return spec;
}

std::string family_name(Family f) {
    switch (f) {
    case Family::Fisk: return "fisk";
    case Family::ParetoSymmetric: return "pareto";
    case Family::StudentT: return "student_t";
    case Family::Lognormal: return "lognormal";
    case Family::Gaussian: return "gaussian";
    }
    return "unknown";
}

std::optional<Family> parse_family(const std::string& name) {
    for (Family f : {Family::Fisk, Family::ParetoSymmetric, Family::StudentT, Family::Lognormal, Family::Gaussian}) {
        if (family_name(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

void InlierDistribution::validate() const {
    if (!(param > 0.0) || !std::isfinite(param)) {
        throw ParameterError(family_name(family) + ": parameter must be a positive finite number");
    }
    if (family == Family::Lognormal && !(param > 1.0)) {
        throw ParameterError("lognormal: a zero log-mean law has E X^2 > 1; variance must exceed 1");
    }
}

namespace {

// |X| = exp(s Z) with zero log-mean; E X^2 = exp(2 s^2).
double lognormal_log_sd(double variance) {
    return std::sqrt(0.5 * std::log(variance));
}

} // namespace

double density(const InlierDistribution& dist, double x) {
    dist.validate();
    const double p = dist.param;
    const double ax = std::abs(x);
    switch (dist.family) {
    case Family::Fisk: {
        if (ax == 0.0) {
            // limit of c|x|^{c-1}/2 at 0
            return p < 1.0 ? std::numeric_limits<double>::infinity() : (p == 1.0 ? 0.5 : 0.0);
        }
        const double t = std::pow(ax, p);
        return p * std::pow(ax, p - 1.0) / (2.0 * (1.0 + t) * (1.0 + t));
    }
    case Family::ParetoSymmetric:
        return ax < 1.0 ? 0.0 : p / (2.0 * std::pow(ax, p + 1.0));
    case Family::StudentT: {
        const double logc = std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * p) - 0.5 * std::log(p * std::numbers::pi);
        return std::exp(logc - 0.5 * (p + 1.0) * std::log1p(x * x / p));
    }
    case Family::Lognormal: {
        if (ax == 0.0) {
            return 0.0;
        }
        const double s = lognormal_log_sd(p);
        const double z = std::log(ax) / s;
        return std::exp(-0.5 * z * z) / (2.0 * ax * s * std::sqrt(2.0 * std::numbers::pi));
    }
    case Family::Gaussian:
        return std::exp(-0.5 * x * x / p) / std::sqrt(2.0 * std::numbers::pi * p);
    }
    return 0.0;
}

std::optional<double> abs_moment(const InlierDistribution& dist, double q) {
    dist.validate();
    const double p = dist.param;
    switch (dist.family) {
    case Family::Fisk: {
        // E|X|^q = B(1 + q/c, 1 - q/c) = (q pi / c) / sin(q pi / c)
        if (q >= p) return std::nullopt;
        const double a = q * std::numbers::pi / p;
        return a / std::sin(a);
    }
    case Family::ParetoSymmetric:
        if (q >= p) return std::nullopt;
        return p / (p - q);
    case Family::StudentT: {
        if (q >= p) return std::nullopt;
        const double logm = 0.5 * q * std::log(p) + std::lgamma(0.5 * (q + 1.0)) + std::lgamma(0.5 * (p - q)) -
                            0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * p);
        return std::exp(logm);
    }
    case Family::Lognormal: {
        const double s = lognormal_log_sd(p);
        return std::exp(0.5 * q * q * s * s);
    }
    case Family::Gaussian: {
        if (q == 2.0) return p;
        const double sigma = std::sqrt(p);
        const double logm = 0.5 * q * std::log(2.0) + std::lgamma(0.5 * (q + 1.0)) - 0.5 * std::log(std::numbers::pi);
        return std::pow(sigma, q) * std::exp(logm);
    }
    }
    return std::nullopt;
}

double draw_noise(const InlierDistribution& dist, CounterRng& rng) {
    const double p = dist.param;
    switch (dist.family) {
    case Family::Fisk: {
        // |X| = (U / (1 - U))^{1/c}
        const double u = rng.uniform_open();
        const double magnitude = std::pow(u / (1.0 - u), 1.0 / p);
        return rng.coin() ? magnitude : -magnitude;
    }
    case Family::ParetoSymmetric: {
        const double magnitude = std::pow(rng.uniform_open(), -1.0 / p);
        return rng.coin() ? magnitude : -magnitude;
    }
    case Family::StudentT: {
        std::student_t_distribution<double> t(p);
        return t(rng);
    }
    case Family::Lognormal: {
        const double s = lognormal_log_sd(p);
        std::normal_distribution<double> z(0.0, 1.0);
        const double magnitude = std::exp(s * z(rng));
        return rng.coin() ? magnitude : -magnitude;
    }
    case Family::Gaussian: {
        std::normal_distribution<double> z(0.0, std::sqrt(p));
        return z(rng);
    }
    }
    return 0.0;
}

Vector dense_mean(const SparseMeanSpec& mean) {
    Vector out(mean.dimension, 0.0);
    for (const auto& [index, value] : mean.entries) {
        out.at(index) = value;
    }
    return out;
}

SampleMatrix sample_inliers(const InlierDistribution& dist, const SparseMeanSpec& mean, std::size_t n,
                            std::uint64_t seed, Backend backend) {
    dist.validate();
    mean.validate();
    if (n == 0) {
        throw ParameterError("sample_inliers: n must be positive");
    }
    const std::size_t d = mean.dimension;
    const Vector shift = dense_mean(mean);
    SampleMatrix out(n, d);

    auto fill_row = [&](std::size_t r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            CounterRng rng(seed, r, c);
            row[c] = draw_noise(dist, rng) + shift[c];
        }
    };

    if (backend == Backend::Serial) {
        for (std::size_t r = 0; r < n; ++r) {
            fill_row(r);
        }
    } else {
        const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            fill_row(static_cast<std::size_t>(r));
        }
    }
    return out;
}

} // namespace rsme
