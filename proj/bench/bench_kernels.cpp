// Serial reference vs OpenMP kernels. Args: {n, d}; J is fixed at 240.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rsme/kernels.hpp"

namespace {

using rsme::Backend;
namespace k = rsme::kernels;

constexpr std::size_t kJ = 240;

rsme::SampleMatrix random_samples(std::size_t n, std::size_t d) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    rsme::SampleMatrix x(n, d);
    for (auto& v : x.data()) v = normal(rng);
    return x;
}

std::vector<std::size_t> offsets(std::size_t n) {
    std::vector<std::size_t> off(kJ + 1);
    for (std::size_t j = 0; j <= kJ; ++j) off[j] = j * n / kJ;
    return off;
}

std::vector<double> random_means(std::size_t d) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    std::vector<double> m(d * kJ);
    for (auto& v : m) v = normal(rng);
    return m;
}

template <Backend B>
void BM_SubgroupMeans(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto x = random_samples(n, d);
    const auto off = offsets(n);
    std::vector<double> means(d * kJ);
    for (auto _ : state) {
        k::subgroup_means(B, x, off, means);
        benchmark::DoNotOptimize(means.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * d));
}

template <Backend B>
void BM_SignStatistic(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto means = random_means(d);
    std::vector<double> at(d, 0.1), beta(d);
    for (auto _ : state) {
        k::sign_statistic(B, means, kJ, at, beta);
        benchmark::DoNotOptimize(beta.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d * kJ));
}

template <Backend B>
void BM_SubgmUpdate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto means = random_means(d);
    std::vector<double> u(d, 1e-3), v(d, 1e-3), beta(d);
    for (auto _ : state) {
        // tiny eta keeps the factors in range over many iterations
        k::subgm_update(B, means, kJ, u, v, beta, 1e-9);
        benchmark::DoNotOptimize(u.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d * kJ));
}

template <Backend B>
void BM_ConvexUpdate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto means = random_means(d);
    std::vector<double> mu(d, 0.0), beta(d);
    for (auto _ : state) {
        k::convex_update(B, means, kJ, mu, beta, 1e-9);
        benchmark::DoNotOptimize(mu.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(d * kJ));
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int d : {500, 2000, 8000}) b->Args({2000, d});
}

} // namespace

BENCHMARK(BM_SubgroupMeans<Backend::Serial>)->Apply(sizes);
BENCHMARK(BM_SubgroupMeans<Backend::Parallel>)->Apply(sizes);
BENCHMARK(BM_SignStatistic<Backend::Serial>)->Apply(sizes);
BENCHMARK(BM_SignStatistic<Backend::Parallel>)->Apply(sizes);
BENCHMARK(BM_SubgmUpdate<Backend::Serial>)->Apply(sizes);
BENCHMARK(BM_SubgmUpdate<Backend::Parallel>)->Apply(sizes);
BENCHMARK(BM_ConvexUpdate<Backend::Serial>)->Apply(sizes);
BENCHMARK(BM_ConvexUpdate<Backend::Parallel>)->Apply(sizes);

BENCHMARK_MAIN();
