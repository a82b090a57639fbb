#include "rsme/mom.hpp"

#include <algorithm>
#include <cmath>

#include "rsme/contamination.hpp"

namespace rsme {

std::size_t SubgroupRule::raw_count(std::size_t n, double epsilon) const {
    const auto corrupted = static_cast<std::size_t>(std::ceil(epsilon * static_cast<double>(n) - 1e-9));
    switch (kind) {
    case Kind::Theory: return 100 * corrupted;
    case Kind::Practical: return static_cast<std::size_t>(std::floor(1.5 * static_cast<double>(corrupted) + 150.0));
    case Kind::Fixed: return fixed_count;
    }
    return 1;
}

std::string SubgroupRule::describe() const {
    switch (kind) {
    case Kind::Theory: return "theory";
    case Kind::Practical: return "practical";
    case Kind::Fixed: return "fixed:" + std::to_string(fixed_count);
    }
    return "unknown";
}

SubgroupPlan::SubgroupPlan(std::size_t n, std::size_t J, bool clamped) : n_(n), clamped_(clamped) {
    if (n == 0 || J == 0 || J > n) {
        throw ParameterError("SubgroupPlan: need 1 <= J <= n (n=" + std::to_string(n) + ", J=" + std::to_string(J) + ")");
    }
    offsets_.resize(J + 1);
    const std::size_t base = n / J;
    const std::size_t extra = n % J;
    offsets_[0] = 0;
    for (std::size_t j = 0; j < J; ++j) {
        offsets_[j + 1] = offsets_[j] + base + (j < extra ? 1 : 0);
    }
}

std::size_t SubgroupPlan::group_of(std::size_t row) const {
    if (row >= n_) {
        throw ShapeError("SubgroupPlan: row out of range");
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), row);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

SubgroupPlan make_plan(std::size_t n, const SubgroupRule& rule, double epsilon) {
    if (n == 0) {
        throw ParameterError("make_plan: n must be positive");
    }
    if (!(epsilon >= 0.0)) {
        throw ParameterError("make_plan: epsilon must be nonnegative");
    }
    const std::size_t raw = rule.raw_count(n, epsilon);
    const std::size_t J = std::clamp<std::size_t>(raw, 1, n);
    return SubgroupPlan(n, J, J != raw);
}

SubgroupMeans::SubgroupMeans(SubgroupPlan plan, std::size_t d)
    : plan_(std::move(plan)), d_(d), data_(plan_.groups() * d, 0.0) {}

SubgroupMeans SubgroupMeans::select_columns(std::span<const std::size_t> coordinates) const {
    SubgroupMeans out(plan_, coordinates.size());
    const std::size_t J = groups();
    for (std::size_t c = 0; c < coordinates.size(); ++c) {
        if (coordinates[c] >= d_) {
            throw ShapeError("SubgroupMeans::select_columns: coordinate out of range");
        }
        const auto src = column(coordinates[c]);
        std::copy(src.begin(), src.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(c * J));
    }
    return out;
}

SubgroupMeans SubgroupMeans::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        throw ShapeError("SubgroupMeans::from_rows: no rows");
    }
    const std::size_t d = rows.front().size();
    SubgroupMeans out(SubgroupPlan(rows.size(), rows.size()), d);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != d) {
            throw ShapeError("SubgroupMeans::from_rows: ragged rows");
        }
        for (std::size_t i = 0; i < d; ++i) {
            out(j, i) = rows[j][i];
        }
    }
    return out;
}

SubgroupMeans subgroup_means(const SampleMatrix& samples, const SubgroupPlan& plan, Backend backend) {
    if (plan.samples() != samples.rows()) {
        throw ShapeError("subgroup_means: plan covers " + std::to_string(plan.samples()) + " rows, samples have " +
                         std::to_string(samples.rows()));
    }
    SubgroupMeans out(plan, samples.cols());
    kernels::subgroup_means(backend, samples, plan.offsets(), out.raw());
    return out;
}

double mom_1d(std::span<const double> values) {
    if (values.empty()) {
        throw ShapeError("mom_1d: empty input");
    }
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Vector mom_coordinatewise(const SubgroupMeans& means) {
    Vector out(means.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = mom_1d(means.column(i));
    }
    return out;
}

double convex_objective(const SubgroupMeans& means, std::span<const double> mu) {
    if (mu.size() != means.dimension()) {
        throw ShapeError("convex_objective: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (double m : means.column(i)) {
            total += std::abs(m - mu[i]);
        }
    }
    return total / static_cast<double>(means.groups());
}

Vector sign_statistic(const SubgroupMeans& means, std::span<const double> at, Backend backend) {
    if (at.size() != means.dimension()) {
        throw ShapeError("sign_statistic: dimension mismatch");
    }
    Vector beta(at.size());
    kernels::sign_statistic(backend, means.raw(), means.groups(), at, beta);
    return beta;
}

} // namespace rsme
