#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rsme/kernels.hpp"
#include "rsme/matrix.hpp"

namespace rsme {

/// How the subgroup count J is chosen.
struct SubgroupRule {
    enum class Kind { Theory, Practical, Fixed };
    Kind kind = Kind::Practical;
    std::size_t fixed_count = 0;

    static SubgroupRule theory() { return {Kind::Theory, 0}; }
    static SubgroupRule practical() { return {Kind::Practical, 0}; }
    static SubgroupRule fixed(std::size_t J) { return {Kind::Fixed, J}; }

    // Unclamped J for n samples at corruption level epsilon.
    std::size_t raw_count(std::size_t n, double epsilon) const;
    std::string describe() const;
};

/// Contiguous partition of n rows into J groups whose sizes differ by at most
/// one; the larger groups come first.
class SubgroupPlan {
public:
    SubgroupPlan(std::size_t n, std::size_t J, bool clamped = false);

    std::size_t samples() const { return n_; }
    std::size_t groups() const { return offsets_.size() - 1; }
    // B: the smallest group size.
    std::size_t min_group_size() const { return n_ / groups(); }
    std::size_t group_size(std::size_t j) const { return offsets_[j + 1] - offsets_[j]; }
    std::size_t group_of(std::size_t row) const;
    std::span<const std::size_t> offsets() const { return offsets_; }
    // Set when the rule asked for more groups than rows (or zero groups).
    bool clamped() const { return clamped_; }

private:
    std::size_t n_;
    std::vector<std::size_t> offsets_;
    bool clamped_;
};

SubgroupPlan make_plan(std::size_t n, const SubgroupRule& rule, double epsilon);

/// J x d subgroup means, stored coordinate-major (see kernels.hpp).
class SubgroupMeans {
public:
    SubgroupMeans(SubgroupPlan plan, std::size_t d);

    std::size_t groups() const { return plan_.groups(); }
    std::size_t dimension() const { return d_; }
    const SubgroupPlan& plan() const { return plan_; }

    double operator()(std::size_t j, std::size_t i) const { return data_[i * groups() + j]; }
    double& operator()(std::size_t j, std::size_t i) { return data_[i * groups() + j]; }

    // The J means of coordinate i.
    std::span<const double> column(std::size_t i) const { return {data_.data() + i * groups(), groups()}; }
    std::span<const double> raw() const { return data_; }
    std::span<double> raw() { return data_; }

    // New object holding only the listed coordinates, in the given order.
    SubgroupMeans select_columns(std::span<const std::size_t> coordinates) const;

    // Build directly from a J x d row-major table (tests, diagnostics).
    static SubgroupMeans from_rows(const std::vector<std::vector<double>>& rows);

private:
    SubgroupPlan plan_;
    std::size_t d_;
    std::vector<double> data_;
};

SubgroupMeans subgroup_means(const SampleMatrix& samples, const SubgroupPlan& plan, Backend backend = Backend::Parallel);

/// Median; even lengths average the two central order statistics.
double mom_1d(std::span<const double> values);

/// Column-wise mom_1d: the minimizer of (1/J) sum_j ||mean_j - mu||_1.
Vector mom_coordinatewise(const SubgroupMeans& means);

/// (1/J) sum_j ||mean_j - mu||_1.
double convex_objective(const SubgroupMeans& means, std::span<const double> mu);

/// beta_i = (1/J) sum_j sign~(mean_{j,i} - at_i) with sign~(0) = 0.
Vector sign_statistic(const SubgroupMeans& means, std::span<const double> at, Backend backend = Backend::Parallel);

} // namespace rsme
