#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rsme/kernels.hpp"
#include "rsme/matrix.hpp"
#include "rsme/rng.hpp"

namespace rsme {

/// k-sparse mean vector: explicit (index, value) entries, zero elsewhere.
struct SparseMeanSpec {
    std::size_t dimension = 0;
    std::vector<std::pair<std::size_t, double>> entries;

    // Throws ParameterError on duplicate / out-of-range indices or zero values.
    void validate() const;

    std::size_t sparsity() const { return entries.size(); }
    IndexSet support() const;
    double max_abs() const; // mu*_max, 0 for the zero vector
    double min_abs() const; // mu*_min, 0 for the zero vector

    // First k coordinates set to `value` (all-equal nonzeros).
    static SparseMeanSpec leading(std::size_t dimension, std::size_t k, double value);
    // First values.size() coordinates set to the given values.
    static SparseMeanSpec leading(std::size_t dimension, const std::vector<double>& values);
};

enum class Family { Fisk, ParetoSymmetric, StudentT, Lognormal, Gaussian };

std::string family_name(Family f);
std::optional<Family> parse_family(const std::string& name);

/// Inlier noise law. `param` is c for Fisk, b for Pareto, nu for Student's t,
/// and the target variance for Lognormal (> 1) and Gaussian. Fisk, Pareto and
/// Lognormal draw a magnitude and attach an independent fair sign, so every
/// family is symmetric about 0. Lognormal magnitudes have zero log-mean.
struct InlierDistribution {
    Family family = Family::Gaussian;
    double param = 1.0;

    static InlierDistribution fisk(double c) { return {Family::Fisk, c}; }
    static InlierDistribution pareto(double b) { return {Family::ParetoSymmetric, b}; }
    static InlierDistribution student_t(double nu) { return {Family::StudentT, nu}; }
    static InlierDistribution lognormal(double variance) { return {Family::Lognormal, variance}; }
    static InlierDistribution gaussian(double variance) { return {Family::Gaussian, variance}; }

    void validate() const;
};

/// Closed-form density of a single coordinate.
double density(const InlierDistribution& dist, double x);

/// E|X|^p when finite.
std::optional<double> abs_moment(const InlierDistribution& dist, double p);

/// sigma^2 of one coordinate (nullopt when infinite).
inline std::optional<double> variance(const InlierDistribution& dist) { return abs_moment(dist, 2.0); }

/// One zero-mean draw from the counter stream `rng`.
double draw_noise(const InlierDistribution& dist, CounterRng& rng);

Vector dense_mean(const SparseMeanSpec& mean);

/// n i.i.d. rows of `dist` shifted by dense_mean(mean). Bit-identical for any
/// backend or thread count.
SampleMatrix sample_inliers(const InlierDistribution& dist, const SparseMeanSpec& mean, std::size_t n,
                            std::uint64_t seed, Backend backend = Backend::Parallel);

} // namespace rsme
