#include "rsme/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rsme/rng.hpp"

namespace rsme {

std::size_t corrupted_count(std::size_t n, double epsilon) {
    // guard against 0.2 * 10 evaluating to 1.9999...
    const double raw = epsilon * static_cast<double>(n);
    const double nearest = std::round(raw);
    const double count = std::abs(raw - nearest) < 1e-9 * std::max(1.0, raw) ? nearest : std::floor(raw);
    return static_cast<std::size_t>(count);
}

namespace {

void check_width(const Vector& v, std::size_t d, const char* what) {
    if (v.size() != d) {
        throw ShapeError(std::string("apply_contamination: ") + what + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(d));
    }
}

IndexSet choose_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
    // partial Fisher-Yates with a counter-based stream
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    CounterRng rng(derive_seed(seed, {hash_name("contamination-rows")}));
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    IndexSet rows(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(rows.begin(), rows.end());
    return rows;
}

} // namespace

SampleMatrix apply_contamination(const SampleMatrix& samples, const ContaminationSpec& spec, std::uint64_t seed) {
    if (!(spec.epsilon >= 0.0 && spec.epsilon < 0.5)) {
        throw ParameterError("apply_contamination: epsilon must lie in [0, 0.5)");
    }
    if (!samples.corrupted_rows().empty()) {
        throw StateError("apply_contamination: samples are already contaminated");
    }
    SampleMatrix out = samples;
    if (std::holds_alternative<strategy::None>(spec.strategy)) {
        return out;
    }
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    const std::size_t m = corrupted_count(n, spec.epsilon);
    if (m == 0) {
        return out;
    }
    const IndexSet rows = choose_rows(n, m, seed);

    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, strategy::ConstantBias>) {
                check_width(s.center, d, "center");
                check_width(s.shift, d, "shift");
                for (std::size_t r : rows) {
                    auto row = out.row(r);
                    for (std::size_t c = 0; c < d; ++c) {
                        row[c] = s.center[c] + s.shift[c];
                    }
                }
            } else if constexpr (std::is_same_v<S, strategy::HeavyTailOutliers>) {
                if (!(s.scale > 0.0)) {
                    throw ParameterError("apply_contamination: Cauchy scale must be positive");
                }
                const std::uint64_t stream = derive_seed(seed, {hash_name("contamination-values")});
                for (std::size_t r : rows) {
                    auto row = out.row(r);
                    for (std::size_t c = 0; c < d; ++c) {
                        CounterRng rng(stream, r, c);
                        std::cauchy_distribution<double> cauchy(s.location, s.scale);
                        row[c] = cauchy(rng);
                    }
                }
            } else if constexpr (std::is_same_v<S, strategy::PointMass>) {
                check_width(s.value, d, "point mass");
                for (std::size_t r : rows) {
                    std::copy(s.value.begin(), s.value.end(), out.row(r).begin());
                }
            }
        },
        spec.strategy);

    out.set_corrupted_rows(rows);
    return out;
}

ContaminationSpec make_lower_bound_adversary(double sigma, double epsilon, std::size_t support_index,
                                             std::size_t dimension) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("lower-bound adversary: epsilon must be positive");
    }
    if (!(sigma > 0.0)) {
        throw ParameterError("lower-bound adversary: sigma must be positive");
    }
    if (support_index >= dimension) {
        throw ShapeError("lower-bound adversary: support index out of range");
    }
    Vector value(dimension, 0.0);
    value[support_index] = sigma / std::sqrt(epsilon);
    return {epsilon, strategy::PointMass{std::move(value)}};
}

ContaminationSpec make_constant_bias(double epsilon, const Vector& center, double c) {
    return {epsilon, strategy::ConstantBias{center, Vector(center.size(), c)}};
}

} // namespace rsme
