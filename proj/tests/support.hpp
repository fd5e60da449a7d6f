#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "rsense/params.hpp"

namespace testing {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// Fixed-seed uniform sampler for property tests.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

private:
    std::mt19937_64 rng_;
};

inline rsense::ParamSet reference_point(double chi) {
    return rsense::ParamSet{2.0, 4e-3, 1.0, chi};
}

} // namespace testing
