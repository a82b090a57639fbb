#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rsme/contamination.hpp"
#include "rsme/densefilter.hpp"
#include "rsme/sampling.hpp"
#include "testgen.hpp"

using namespace rsme;

namespace {

double l2(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

Vector column_means(const SampleMatrix& x) {
    Vector m(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) m[c] += x(r, c);
    }
    for (double& v : m) v /= static_cast<double>(x.rows());
    return m;
}

SampleMatrix permute_rows(const SampleMatrix& x, const std::vector<std::size_t>& perm) {
    SampleMatrix y(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        std::copy(x.row(perm[r]).begin(), x.row(perm[r]).end(), y.row(r).begin());
    }
    return y;
}

} // namespace

TEST_CASE("projection") {
    SampleMatrix x(2, 3, {1, 2, 3, 4, 5, 6});
    x.set_corrupted_rows({1});
    const auto p = project_to_support(x, {0, 2});
    CHECK(p.rows() == 2);
    CHECK(p.cols() == 2);
    CHECK(p(0, 0) == 1);
    CHECK(p(0, 1) == 3);
    CHECK(p(1, 1) == 6);
    CHECK(p.corrupted_rows() == IndexSet{1});
    CHECK(project_to_support(x, {0, 1, 2}) == x);
    const auto empty = project_to_support(x, {});
    CHECK(empty.rows() == 2);
    CHECK(empty.cols() == 0);
    CHECK_THROWS_AS(project_to_support(x, {3}), ShapeError);
}

TEST_CASE("assembly") {
    CHECK(assemble_full_estimate({}, {}, 3) == Vector{0, 0, 0});
    CHECK(assemble_full_estimate({1}, {7}, 3) == Vector{0, 7, 0});
    CHECK(assemble_full_estimate({0, 1, 2}, {4, 5, 6}, 3) == Vector{4, 5, 6});
    CHECK_THROWS_AS(assemble_full_estimate({1, 2}, {7}, 3), ShapeError);
    CHECK_THROWS_AS(assemble_full_estimate({3}, {7}, 3), ShapeError);
}

TEST_CASE("dense estimator examples") {
    const SampleMatrix x(5, 1, {0, 0, 0, 0, 1000});
    CHECK(dense_robust_mean(x, 0.2, dense::CoordMoM{SubgroupRule::fixed(5)}, 1) == Vector{0.0});
    CHECK(dense_robust_mean(SampleMatrix(5, 0), 0.2, dense::IterativeFilter{}, 1).empty());
    CHECK_THROWS_AS(dense_robust_mean(x, 0.5, dense::CoordMoM{}, 1), ParameterError);

    // already below the threshold: the plain sample mean, nothing removed
    testgen::Gen g(1);
    const SampleMatrix y = g.matrix(200, 3, 0.5);
    dense::IterativeFilter filter;
    filter.sigma2 = 1.0;
    const auto out = iterative_filter(y, 0.0, filter, 3);
    CHECK(out.rounds == 0);
    CHECK(out.removed == 0);
    CHECK(out.estimate == column_means(y));
    CHECK(dense_robust_mean(y, 0.0, filter, 3) == column_means(y));
}

TEST_CASE("estimator validation") {
    dense::IterativeFilter f;
    f.max_rounds = 0;
    CHECK_THROWS_AS(validate(DenseEstimator{f}), ParameterError);
    f = {};
    f.score_quantile = 0.5;
    CHECK_THROWS_AS(validate(DenseEstimator{f}), ParameterError);
    f.score_quantile = 1.0;
    CHECK_THROWS_AS(validate(DenseEstimator{f}), ParameterError);
    f.score_quantile = 0.8;
    CHECK_NOTHROW(validate(DenseEstimator{f}));
    f.sigma2 = -1.0;
    CHECK_THROWS_AS(validate(DenseEstimator{f}), ParameterError);
}

TEST_CASE("power iteration") {
    const auto diag = top_eigenpair({3, 0, 0, 1}, 2, 100, 1);
    CHECK(diag.value == doctest::Approx(3.0));
    CHECK(std::abs(diag.vector[0]) == doctest::Approx(1.0));
    CHECK(top_eigenpair({0, 0, 0, 0}, 2, 100, 1).value == 0.0);
    CHECK(top_eigenpair({}, 0, 100, 1).vector.empty());

    testgen::Gen g(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t k = g.index(1, 6);
        // A = B B^T + shift: symmetric positive definite with a clear gap
        std::vector<double> b(k * k), a(k * k, 0.0);
        for (double& x : b) x = g.normal();
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t l = 0; l < k; ++l) a[i * k + j] += b[i * k + l] * b[j * k + l];
            }
        }
        const auto top = top_eigenpair(a, k, 2000, g.u64());
        // A v = lambda v
        double resid = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < k; ++j) s += a[i * k + j] * top.vector[j];
            resid = std::max(resid, std::abs(s - top.value * top.vector[i]));
        }
        CHECK(resid <= 1e-6 * std::max(1.0, top.value));
        // no unit vector has a larger Rayleigh quotient
        for (int probe = 0; probe < 200; ++probe) {
            Vector v(k);
            double norm = 0.0;
            for (double& x : v) {
                x = g.normal();
                norm += x * x;
            }
            double q = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) q += v[i] * a[i * k + j] * v[j];
            }
            REQUIRE(q / norm <= top.value * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("sigma2 estimate is close to the variance") {
    const auto x = sample_inliers(InlierDistribution::gaussian(4.0), SparseMeanSpec::leading(5, 2, 3.0), 3000, 8);
    CHECK(estimate_sigma2(x, 0.0) == doctest::Approx(4.0).epsilon(0.2));
    const auto y = apply_contamination(x, make_constant_bias(0.1, dense_mean(SparseMeanSpec::leading(5, 2, 3.0)), 50.0), 9);
    // heuristic under contamination: inflated, but on the inlier scale rather than the outliers' (2500)
    const double contaminated = estimate_sigma2(y, 0.1);
    CHECK(contaminated >= 4.0 * 0.8);
    CHECK(contaminated <= 4.0 * 3.0);
}

TEST_CASE("one-cluster outliers: error within 5 (sigma sqrt(eps) + sigma sqrt(k/n))") {
    const std::size_t k = 8, n = 2000;
    const double eps = 0.1;
    const double bound = 5.0 * (std::sqrt(eps) + std::sqrt(static_cast<double>(k) / n));
    const auto mean = SparseMeanSpec::leading(k, {1.0, -2.0, 3.0, 0.5, -1.5, 2.0, 4.0, -0.25});
    const Vector truth = dense_mean(mean);
    Vector cluster = truth;
    for (double& x : cluster) x += 10.0 / std::sqrt(static_cast<double>(k)); // distance 10 from the mean
    dense::IterativeFilter filter;
    filter.sigma2 = 1.0;
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        const auto clean = sample_inliers(InlierDistribution::gaussian(1.0), mean, n, 100 + s);
        const auto x = apply_contamination(clean, {eps, strategy::PointMass{cluster}}, 200 + s);
        const auto out = iterative_filter(x, eps, filter, 300 + s);
        worst = std::max(worst, l2(out.estimate, truth));
        CHECK_FALSE(out.over_removed);
    }
    CAPTURE(worst);
    CHECK(worst <= bound);
}

TEST_CASE("clean data: both variants within 5 sigma sqrt(k/n) in 95% of trials") {
    const std::size_t k = 8, n = 2000;
    const auto mean = SparseMeanSpec::leading(k, 8, 1.5);
    const Vector truth = dense_mean(mean);
    const double bound = 5.0 * std::sqrt(static_cast<double>(k) / n);
    dense::IterativeFilter filter;
    filter.sigma2 = 1.0;
    int mom_ok = 0, filter_ok = 0;
    for (int s = 0; s < 100; ++s) {
        const auto x = sample_inliers(InlierDistribution::gaussian(1.0), mean, n, 400 + s);
        mom_ok += l2(dense_robust_mean(x, 0.0, dense::CoordMoM{}, 1), truth) <= bound ? 1 : 0;
        filter_ok += l2(dense_robust_mean(x, 0.0, filter, 1), truth) <= bound ? 1 : 0;
    }
    CHECK(mom_ok >= 95);
    CHECK(filter_ok >= 95);
}

TEST_CASE("property: translation equivariance") {
    testgen::Gen g(3);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = g.index(50, 300), k = g.index(1, 5);
        // dyadic data so that shifts are exact
        SampleMatrix x(n, k);
        for (double& v : x.data()) v = g.small_int(400) / 64.0;
        const double c = g.small_int(50) / 4.0;
        SampleMatrix y = x;
        for (double& v : y.data()) v += c;
        const double eps = g.uniform(0.0, 0.3);

        const Vector a = dense_robust_mean(x, eps, dense::CoordMoM{}, 1);
        const Vector b = dense_robust_mean(y, eps, dense::CoordMoM{}, 1);
        for (std::size_t i = 0; i < k; ++i) REQUIRE(b[i] == a[i] + c);

        // continuous data for the filter (ties in the score cut are then a null event)
        const SampleMatrix xc = g.matrix(n, k);
        SampleMatrix yc = xc;
        const double cc = g.uniform(-20, 20);
        for (double& v : yc.data()) v += cc;
        dense::IterativeFilter filter;
        filter.sigma2 = 0.5; // makes the filter do some work
        const Vector fa = dense_robust_mean(xc, eps, filter, 7);
        const Vector fb = dense_robust_mean(yc, eps, filter, 7);
        for (std::size_t i = 0; i < k; ++i) REQUIRE(fb[i] == doctest::Approx(fa[i] + cc).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("property: permutation invariance") {
    testgen::Gen g(4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = g.index(20, 200), k = g.index(1, 4);
        const SampleMatrix x = g.matrix(n, k);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), g.engine());
        const SampleMatrix y = permute_rows(x, perm);

        // singleton groups: the coordinatewise median of the rows
        const DenseEstimator singletons = dense::CoordMoM{SubgroupRule::fixed(n)};
        REQUIRE(dense_robust_mean(x, 0.1, singletons, 1) == dense_robust_mean(y, 0.1, singletons, 1));

        dense::IterativeFilter filter;
        filter.sigma2 = 0.6;
        const Vector a = dense_robust_mean(x, 0.1, filter, 5);
        const Vector b = dense_robust_mean(y, 0.1, filter, 5);
        for (std::size_t i = 0; i < k; ++i) REQUIRE(a[i] == doctest::Approx(b[i]).epsilon(1e-9).scale(1.0));
    }
    // coarser groups: permuting rows inside each group changes nothing (dyadic data, exact sums)
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = g.index(20, 200), J = g.index(1, 10);
        SampleMatrix x(n, 2);
        for (double& v : x.data()) v = g.small_int(100) / 16.0;
        const SubgroupPlan plan(n, J);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t j = 0; j < J; ++j) {
            std::shuffle(perm.begin() + static_cast<std::ptrdiff_t>(plan.offsets()[j]),
                         perm.begin() + static_cast<std::ptrdiff_t>(plan.offsets()[j + 1]), g.engine());
        }
        const DenseEstimator est = dense::CoordMoM{SubgroupRule::fixed(J)};
        REQUIRE(dense_robust_mean(x, 0.0, est, 1) == dense_robust_mean(permute_rows(x, perm), 0.0, est, 1));
    }
}

TEST_CASE("over-removal is reported, not fatal") {
    testgen::Gen g(5);
    const SampleMatrix x = g.matrix(500, 3);
    dense::IterativeFilter filter;
    filter.sigma2 = 1e-3; // far below the data's variance: the filter keeps cutting
    const auto out = iterative_filter(x, 0.05, filter, 1);
    CHECK(out.over_removed);
    CHECK(out.rounds <= filter.max_rounds);
    CHECK(out.removed < 500);
    CHECK(out.estimate.size() == 3);
}

TEST_CASE("the filter never over-removes on contaminated test instances") {
    const auto mean = SparseMeanSpec::leading(6, 6, 2.0);
    for (double eps : {0.05, 0.1, 0.2, 0.3}) {
        for (int s = 0; s < 10; ++s) {
            const auto clean = sample_inliers(InlierDistribution::gaussian(1.0), mean, 1000, 40 + s);
            const auto x = apply_contamination(clean, make_constant_bias(eps, dense_mean(mean), 1.0 / std::sqrt(eps)), 60 + s);
            dense::IterativeFilter filter;
            filter.sigma2 = 1.0;
            const auto out = iterative_filter(x, eps, filter, 1);
            CAPTURE(eps);
            CHECK_FALSE(out.over_removed);
        }
    }
}
