#include "doctest.h"

#include <bit>
#include <cstring>

#include <omp.h>

#include "rsme/kernels.hpp"
#include "rsme/mom.hpp"
#include "testgen.hpp"

using namespace rsme;

namespace {

bool bit_equal(const Vector& a, const Vector& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

// The parallel kernels must reproduce the serial reference bit for bit.
TEST_CASE("property: parallel kernels are bit-identical to the serial reference") {
    testgen::Gen g(1);
    for (int threads : {1, 3, 8}) {
        omp_set_num_threads(threads);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = g.index(1, 120), d = g.index(1, 70);
            const SubgroupPlan plan(n, g.index(1, n));
            const std::size_t J = plan.groups();
            const SampleMatrix x = g.matrix(n, d, 3.0);

            Vector ms(J * d), mp(J * d);
            kernels::serial::subgroup_means(x, plan.offsets(), ms);
            kernels::parallel::subgroup_means(x, plan.offsets(), mp);
            REQUIRE(bit_equal(ms, mp));

            // ties between `at` and some means exercise sign~(0) = 0
            Vector at(d);
            for (std::size_t i = 0; i < d; ++i) {
                at[i] = g.coin() ? ms[i * J + g.index(0, J - 1)] : g.normal();
            }
            Vector bs(d), bp(d);
            kernels::serial::sign_statistic(ms, J, at, bs);
            kernels::parallel::sign_statistic(ms, J, at, bp);
            REQUIRE(bit_equal(bs, bp));

            Vector us(d, 1e-3), vs(d, 1e-3), up = us, vp = vs;
            for (int step = 0; step < 25; ++step) {
                kernels::serial::subgm_update(ms, J, us, vs, bs, 0.07);
                kernels::parallel::subgm_update(ms, J, up, vp, bp, 0.07);
            }
            REQUIRE(bit_equal(us, up));
            REQUIRE(bit_equal(vs, vp));
            REQUIRE(bit_equal(bs, bp));

            Vector cs(d, 0.0), cp(d, 0.0);
            for (int step = 0; step < 25; ++step) {
                kernels::serial::convex_update(ms, J, cs, bs, 0.05);
                kernels::parallel::convex_update(ms, J, cp, bp, 0.05);
            }
            REQUIRE(bit_equal(cs, cp));
        }
    }
}

TEST_CASE("dispatch reaches both implementations") {
    const auto m = SubgroupMeans::from_rows({{1.0, -1.0}, {2.0, -2.0}, {3.0, 5.0}});
    const Vector at{0.0, 0.0};
    Vector a(2), b(2);
    kernels::sign_statistic(Backend::Serial, m.raw(), 3, at, a);
    kernels::sign_statistic(Backend::Parallel, m.raw(), 3, at, b);
    CHECK(a == Vector{1.0, -1.0 / 3.0});
    CHECK(a == b);
}

TEST_CASE("subgm_update uses beta evaluated before the step") {
    const auto m = SubgroupMeans::from_rows({{1.0}});
    Vector u{0.1}, v{0.1}, beta(1);
    kernels::serial::subgm_update(m.raw(), 1, u, v, beta, 0.05);
    CHECK(beta[0] == 1.0);
    CHECK(u[0] == doctest::Approx(0.105));
    CHECK(v[0] == doctest::Approx(0.095));
}
