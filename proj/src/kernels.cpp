#include "rsme/kernels.hpp"

#include <cstdint>
#include <vector>

namespace rsme::kernels {
namespace {

inline double sign_average(const double* column, std::size_t J, double at) {
    // column[j] - at is compared with 0 through the equivalent column[j] vs at
    std::int64_t above = 0;
    std::int64_t below = 0;
    for (std::size_t j = 0; j < J; ++j) {
        above += column[j] > at ? 1 : 0;
        below += column[j] < at ? 1 : 0;
    }
    return static_cast<double>(above - below) / static_cast<double>(J);
}

inline void group_mean(const SampleMatrix& samples, std::size_t begin, std::size_t end, std::size_t J,
                       std::size_t j, std::vector<double>& acc, double* means) {
    const std::size_t d = samples.cols();
    acc.assign(d, 0.0);
    for (std::size_t r = begin; r < end; ++r) {
        const auto row = samples.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            acc[i] += row[i];
        }
    }
    const double size = static_cast<double>(end - begin);
    for (std::size_t i = 0; i < d; ++i) {
        means[i * J + j] = acc[i] / size;
    }
}

inline void factor_step(const double* column, std::size_t J, double& u, double& v, double& beta, double eta) {
    beta = sign_average(column, J, u * u - v * v);
    u *= 1.0 + eta * beta;
    v *= 1.0 - eta * beta;
}

} // namespace

namespace serial {

void subgroup_means(const SampleMatrix& samples, std::span<const std::size_t> offsets, std::span<double> means) {
    const std::size_t J = offsets.size() - 1;
    std::vector<double> acc;
    for (std::size_t j = 0; j < J; ++j) {
        group_mean(samples, offsets[j], offsets[j + 1], J, j, acc, means.data());
    }
}

void sign_statistic(std::span<const double> means, std::size_t J, std::span<const double> at, std::span<double> beta) {
    for (std::size_t i = 0; i < at.size(); ++i) {
        beta[i] = sign_average(means.data() + i * J, J, at[i]);
    }
}

void subgm_update(std::span<const double> means, std::size_t J, std::span<double> u, std::span<double> v,
                  std::span<double> beta, double eta) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        factor_step(means.data() + i * J, J, u[i], v[i], beta[i], eta);
    }
}

void convex_update(std::span<const double> means, std::size_t J, std::span<double> mu, std::span<double> beta,
                   double eta) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
        beta[i] = sign_average(means.data() + i * J, J, mu[i]);
        mu[i] += eta * beta[i];
    }
}

} // namespace serial

namespace parallel {

void subgroup_means(const SampleMatrix& samples, std::span<const std::size_t> offsets, std::span<double> means) {
    const std::ptrdiff_t J = static_cast<std::ptrdiff_t>(offsets.size()) - 1;
#pragma omp parallel
    {
        std::vector<double> acc;
#pragma omp for schedule(static)
        for (std::ptrdiff_t j = 0; j < J; ++j) {
            group_mean(samples, offsets[j], offsets[j + 1], static_cast<std::size_t>(J), static_cast<std::size_t>(j),
                       acc, means.data());
        }
    }
}

void sign_statistic(std::span<const double> means, std::size_t J, std::span<const double> at, std::span<double> beta) {
    const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(at.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < d; ++i) {
        beta[i] = sign_average(means.data() + i * J, J, at[i]);
    }
}

void subgm_update(std::span<const double> means, std::size_t J, std::span<double> u, std::span<double> v,
                  std::span<double> beta, double eta) {
    const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < d; ++i) {
        factor_step(means.data() + i * J, J, u[i], v[i], beta[i], eta);
    }
}

void convex_update(std::span<const double> means, std::size_t J, std::span<double> mu, std::span<double> beta,
                   double eta) {
    const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(mu.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < d; ++i) {
        beta[i] = sign_average(means.data() + i * J, J, mu[i]);
        mu[i] += eta * beta[i];
    }
}

} // namespace parallel
} // namespace rsme::kernels
