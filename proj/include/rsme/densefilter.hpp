#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>

#include "rsme/matrix.hpp"
#include "rsme/mom.hpp"

namespace rsme {

namespace dense {

struct CoordMoM {
    SubgroupRule rule = SubgroupRule::practical();
};

// Spectral filter: while the top eigenvalue of the empirical covariance of the
// surviving rows exceeds sigma2 * (1 + threshold_factor * epsilon), drop the
// rows whose squared projection on the top eigenvector is above the
// score_quantile of the current scores.
struct IterativeFilter {
    std::size_t max_rounds = 50;
    std::optional<double> score_quantile; // default max(1 - 2 eps, 0.9)
    double threshold_factor = 9.0;
    std::optional<double> sigma2;         // estimated from the data when absent
    std::size_t power_iterations = 100;
};

} // namespace dense

using DenseEstimator = std::variant<dense::CoordMoM, dense::IterativeFilter>;

void validate(const DenseEstimator& est);

/// n x |support| matrix of the listed columns; row order and corrupted_rows kept.
SampleMatrix project_to_support(const SampleMatrix& samples, const IndexSet& support);

struct FilterOutcome {
    Vector estimate;
    std::size_t rounds = 0;
    std::size_t removed = 0;
    double sigma2 = 0.0;
    // Removed more than 2 eps n + ceil(ln n) rows. Reported, not an error.
    bool over_removed = false;
};

FilterOutcome iterative_filter(const SampleMatrix& samples, double epsilon, const dense::IterativeFilter& cfg,
                               std::uint64_t seed);

/// Coordinate-wise MoM of squared deviations from the coordinate-wise MoM
/// center, maximized over coordinates. A heuristic scale for the filter.
double estimate_sigma2(const SampleMatrix& samples, double epsilon);

/// Top eigenpair of a symmetric k x k row-major matrix by power iteration
/// from a start vector drawn with `seed`.
struct Eigenpair {
    double value = 0.0;
    Vector vector;
};
Eigenpair top_eigenpair(const std::vector<double>& sym, std::size_t k, std::size_t iterations, std::uint64_t seed);

Vector dense_robust_mean(const SampleMatrix& samples, double epsilon, const DenseEstimator& est, std::uint64_t seed);

/// Scatter onto `support` in a zero d-vector.
Vector assemble_full_estimate(const IndexSet& support, const Vector& dense_estimate, std::size_t d);

} // namespace rsme
