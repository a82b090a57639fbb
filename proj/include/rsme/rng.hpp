#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace rsme {

// SplitMix64 finalizer: a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// Stable combination of a seed with any number of counters. Order matters.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters);

// FNV-1a, used to turn names (estimator labels, stream tags) into counters.
std::uint64_t hash_name(std::string_view name);

/// Counter-based generator: a SplitMix64 stream whose starting point is a
/// pure function of (seed, counters). Each matrix cell gets its own stream,
/// so generation order and thread count never affect the output.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t state) : state_(state) {}
    CounterRng(std::uint64_t seed, std::uint64_t row, std::uint64_t col, std::uint64_t stream = 0)
        : state_(derive_seed(seed, {row, col, stream})) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on the open interval (0, 1); 53 random bits.
    double uniform_open() {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool coin() { return ((*this)() >> 63) != 0; }

private:
    std::uint64_t state_;
};

} // namespace rsme
