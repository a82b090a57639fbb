#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>

#include "rsme/matrix.hpp"

namespace rsme {

namespace strategy {

struct None {};

// Replaced rows become center + shift (identical copies).
struct ConstantBias {
    Vector center;
    Vector shift;
};

// Every coordinate of a replaced row is an i.i.d. Cauchy(location, scale) draw.
struct HeavyTailOutliers {
    double location = 20.0;
    double scale = 7.0710678118654755; // sqrt(50)
};

// Replaced rows all equal `value`.
struct PointMass {
    Vector value;
};

} // namespace strategy

using OutlierStrategy = std::variant<strategy::None, strategy::ConstantBias, strategy::HeavyTailOutliers, strategy::PointMass>;

struct ContaminationSpec {
    double epsilon = 0.0;
    OutlierStrategy strategy = strategy::None{};
};

/// floor(epsilon * n): the number of rows an epsilon-adversary replaces.
std::size_t corrupted_count(std::size_t n, double epsilon);

/// Replaces floor(epsilon * n) rows, chosen uniformly at random with `seed`,
/// according to the strategy and records them in corrupted_rows. All other
/// rows are left bit-identical.
SampleMatrix apply_contamination(const SampleMatrix& samples, const ContaminationSpec& spec, std::uint64_t seed);

/// Two-point lower-bound construction: a point mass at sigma/sqrt(epsilon) on
/// one coordinate.
ContaminationSpec make_lower_bound_adversary(double sigma, double epsilon, std::size_t support_index,
                                             std::size_t dimension);

/// ConstantBias with shift = c * 1.
ContaminationSpec make_constant_bias(double epsilon, const Vector& center, double c);

} // namespace rsme
