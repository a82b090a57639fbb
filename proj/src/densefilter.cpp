#include "rsme/densefilter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rsme/rng.hpp"

namespace rsme {

void validate(const DenseEstimator& est) {
    if (const auto* f = std::get_if<dense::IterativeFilter>(&est)) {
        if (f->max_rounds < 1) {
            throw ParameterError("filter: max_rounds must be >= 1");
        }
        if (f->score_quantile && !(*f->score_quantile > 0.5 && *f->score_quantile < 1.0)) {
            throw ParameterError("filter: score_quantile must lie in (0.5, 1)");
        }
        if (f->sigma2 && !(*f->sigma2 > 0.0)) {
            throw ParameterError("filter: sigma2 must be positive");
        }
        if (!(f->threshold_factor >= 0.0)) {
            throw ParameterError("filter: threshold factor must be nonnegative");
        }
    }
}

SampleMatrix project_to_support(const SampleMatrix& samples, const IndexSet& support) {
    for (std::size_t c : support) {
        if (c >= samples.cols()) {
            throw ShapeError("project_to_support: index " + std::to_string(c) + " out of range");
        }
    }
    SampleMatrix out(samples.rows(), support.size());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        const auto src = samples.row(r);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < support.size(); ++c) {
            dst[c] = src[support[c]];
        }
    }
    out.set_corrupted_rows(samples.corrupted_rows());
    return out;
}

double estimate_sigma2(const SampleMatrix& samples, double epsilon) {
    const SubgroupPlan plan = make_plan(samples.rows(), SubgroupRule::practical(), epsilon);
    const Vector center = mom_coordinatewise(subgroup_means(samples, plan, Backend::Serial));
    SampleMatrix sq(samples.rows(), samples.cols());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        for (std::size_t c = 0; c < samples.cols(); ++c) {
            const double dev = samples(r, c) - center[c];
            sq(r, c) = dev * dev;
        }
    }
    const Vector scale = mom_coordinatewise(subgroup_means(sq, plan, Backend::Serial));
    double best = 0.0;
    for (double s : scale) {
        best = std::max(best, s);
    }
    return best;
}

Eigenpair top_eigenpair(const std::vector<double>& sym, std::size_t k, std::size_t iterations, std::uint64_t seed) {
    Eigenpair out{0.0, Vector(k, 0.0)};
    if (k == 0) {
        return out;
    }
    CounterRng rng(derive_seed(seed, {hash_name("power-iteration-start")}));
    std::normal_distribution<double> z;
    Vector v(k);
    for (double& x : v) {
        x = z(rng);
    }
    auto normalize = [](Vector& x) {
        double norm = 0.0;
        for (double e : x) norm += e * e;
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (double& e : x) e /= norm;
        }
        return norm;
    };
    normalize(v);

    Vector w(k);
    auto multiply = [&](const Vector& x, Vector& y) {
        for (std::size_t a = 0; a < k; ++a) {
            double s = 0.0;
            for (std::size_t b = 0; b < k; ++b) s += sym[a * k + b] * x[b];
            y[a] = s;
        }
    };
    for (std::size_t it = 0; it < iterations; ++it) {
        multiply(v, w);
        if (normalize(w) == 0.0) {
            return out; // zero matrix: eigenvalue 0
        }
        v.swap(w);
    }
    multiply(v, w);
    double rayleigh = 0.0;
    for (std::size_t a = 0; a < k; ++a) rayleigh += v[a] * w[a];
    out.value = rayleigh;
    out.vector = std::move(v);
    return out;
}

FilterOutcome iterative_filter(const SampleMatrix& samples, double epsilon, const dense::IterativeFilter& cfg,
                               std::uint64_t seed) {
    const std::size_t n = samples.rows();
    const std::size_t k = samples.cols();
    FilterOutcome out;
    if (k == 0) {
        return out;
    }
    out.sigma2 = cfg.sigma2 ? *cfg.sigma2 : estimate_sigma2(samples, epsilon);
    const double quantile = cfg.score_quantile ? *cfg.score_quantile : std::max(1.0 - 2.0 * epsilon, 0.9);
    const double threshold = out.sigma2 * (1.0 + cfg.threshold_factor * epsilon);

    std::vector<std::size_t> alive(n);
    for (std::size_t r = 0; r < n; ++r) alive[r] = r;

    Vector mean(k);
    std::vector<double> cov(k * k);
    std::vector<double> scores;
    auto compute_moments = [&] {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t r : alive) {
            const auto row = samples.row(r);
            for (std::size_t c = 0; c < k; ++c) mean[c] += row[c];
        }
        const double m = static_cast<double>(alive.size());
        for (double& x : mean) x /= m;
        std::fill(cov.begin(), cov.end(), 0.0);
        Vector dev(k);
        for (std::size_t r : alive) {
            const auto row = samples.row(r);
            for (std::size_t c = 0; c < k; ++c) dev[c] = row[c] - mean[c];
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = a; b < k; ++b) cov[a * k + b] += dev[a] * dev[b];
            }
        }
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) {
                cov[a * k + b] /= m;
                cov[b * k + a] = cov[a * k + b];
            }
        }
    };

    compute_moments();
    while (out.rounds < cfg.max_rounds && alive.size() > 1) {
        const Eigenpair top = top_eigenpair(cov, k, cfg.power_iterations, seed);
        if (top.value <= threshold) {
            break;
        }
        ++out.rounds;
        scores.resize(alive.size());
        for (std::size_t idx = 0; idx < alive.size(); ++idx) {
            const auto row = samples.row(alive[idx]);
            double proj = 0.0;
            for (std::size_t c = 0; c < k; ++c) proj += (row[c] - mean[c]) * top.vector[c];
            scores[idx] = proj * proj;
        }
        std::vector<double> sorted = scores;
        const auto cut = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(sorted.size()))) - 1;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut), sorted.end());
        const double limit = sorted[cut];

        std::vector<std::size_t> kept;
        kept.reserve(alive.size());
        for (std::size_t idx = 0; idx < alive.size(); ++idx) {
            if (scores[idx] <= limit) kept.push_back(alive[idx]);
        }
        if (kept.size() == alive.size() || kept.empty()) {
            break;
        }
        alive.swap(kept);
        compute_moments();
    }
    out.estimate = mean;
    out.removed = n - alive.size();
    const double allowance = 2.0 * epsilon * static_cast<double>(n) + std::ceil(std::log(static_cast<double>(n)));
    out.over_removed = static_cast<double>(out.removed) > allowance;
    return out;
}

Vector dense_robust_mean(const SampleMatrix& samples, double epsilon, const DenseEstimator& est, std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw ParameterError("dense_robust_mean: epsilon must lie in [0, 0.5)");
    }
    validate(est);
    if (samples.cols() == 0) {
        return {};
    }
    if (const auto* mom = std::get_if<dense::CoordMoM>(&est)) {
        const SubgroupPlan plan = make_plan(samples.rows(), mom->rule, epsilon);
        return mom_coordinatewise(subgroup_means(samples, plan, Backend::Serial));
    }
    return iterative_filter(samples, epsilon, std::get<dense::IterativeFilter>(est), seed).estimate;
}

Vector assemble_full_estimate(const IndexSet& support, const Vector& dense_estimate, std::size_t d) {
    if (support.size() != dense_estimate.size()) {
        throw ShapeError("assemble_full_estimate: support has " + std::to_string(support.size()) +
                         " entries, estimate has " + std::to_string(dense_estimate.size()));
    }
    Vector full(d, 0.0);
    for (std::size_t c = 0; c < support.size(); ++c) {
        if (support[c] >= d) {
            throw ShapeError("assemble_full_estimate: index out of range");
        }
        full[support[c]] = dense_estimate[c];
    }
    return full;
}

} // namespace rsme
