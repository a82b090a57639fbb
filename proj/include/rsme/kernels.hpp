#pragma once

#include <cstddef>
#include <span>

#include "rsme/matrix.hpp"

namespace rsme {

enum class Backend { Serial, Parallel };

/// Hot loops of the estimators. `serial` is the reference implementation;
/// `parallel` is the OpenMP version and must produce bit-identical output
/// (every kernel is a per-column / per-coordinate map with no cross-thread
/// reductions).
///
/// Subgroup means are stored coordinate-major: means[i * J + j] is the mean
/// of coordinate i over subgroup j, so a coordinate's J values are contiguous.
namespace kernels {

namespace serial {

// offsets has J+1 entries; subgroup j covers rows [offsets[j], offsets[j+1]).
void subgroup_means(const SampleMatrix& samples, std::span<const std::size_t> offsets, std::span<double> means);

// beta[i] = (1/J) sum_j sign~(means[i*J+j] - at[i]), sign~(0) = 0.
void sign_statistic(std::span<const double> means, std::size_t J, std::span<const double> at, std::span<double> beta);

// One SubGM iteration on the factors: beta is evaluated at u^2 - v^2, then
// u *= 1 + eta*beta, v *= 1 - eta*beta. beta receives the statistic used.
void subgm_update(std::span<const double> means, std::size_t J, std::span<double> u, std::span<double> v,
                  std::span<double> beta, double eta);

// One subgradient step of the convex l1 loss: mu += eta * beta(mu).
void convex_update(std::span<const double> means, std::size_t J, std::span<double> mu, std::span<double> beta,
                   double eta);

} // namespace serial

namespace parallel {

void subgroup_means(const SampleMatrix& samples, std::span<const std::size_t> offsets, std::span<double> means);
void sign_statistic(std::span<const double> means, std::size_t J, std::span<const double> at, std::span<double> beta);
void subgm_update(std::span<const double> means, std::size_t J, std::span<double> u, std::span<double> v,
                  std::span<double> beta, double eta);
void convex_update(std::span<const double> means, std::size_t J, std::span<double> mu, std::span<double> beta,
                   double eta);

} // namespace parallel

inline void subgroup_means(Backend b, const SampleMatrix& samples, std::span<const std::size_t> offsets,
                           std::span<double> means) {
    b == Backend::Serial ? serial::subgroup_means(samples, offsets, means)
                         : parallel::subgroup_means(samples, offsets, means);
}

inline void sign_statistic(Backend b, std::span<const double> means, std::size_t J, std::span<const double> at,
                           std::span<double> beta) {
    b == Backend::Serial ? serial::sign_statistic(means, J, at, beta) : parallel::sign_statistic(means, J, at, beta);
}

inline void subgm_update(Backend b, std::span<const double> means, std::size_t J, std::span<double> u,
                         std::span<double> v, std::span<double> beta, double eta) {
    b == Backend::Serial ? serial::subgm_update(means, J, u, v, beta, eta)
                         : parallel::subgm_update(means, J, u, v, beta, eta);
}

inline void convex_update(Backend b, std::span<const double> means, std::size_t J, std::span<double> mu,
                          std::span<double> beta, double eta) {
    b == Backend::Serial ? serial::convex_update(means, J, mu, beta, eta)
                         : parallel::convex_update(means, J, mu, beta, eta);
}

} // namespace kernels
} // namespace rsme
