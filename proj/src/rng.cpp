#include "mcarma/rng.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace mcarma::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key_a, std::uint64_t key_b) {
    std::uint64_t s = master;
    std::uint64_t m = splitmix64(s);
    s = m ^ (key_a * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
    m = splitmix64(s);
    s = m ^ (key_b * 0x9E3779B97F4A7C15ULL + 0x94D049BB133111EBULL);
    return splitmix64(s);
}

std::uint64_t double_bits(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return bits;
}

double Stream::uniform01() {
    // 53-bit mantissa, offset by half an ulp so 0 and 1 are excluded.
    return (static_cast<double>(eng_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double Stream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Stream::gamma(double shape, double scale) {
    if (shape < 1.0) {
        // Boost: X ~ Gamma(shape+1), then X * U^(1/shape) ~ Gamma(shape).
        const double x = gamma(shape + 1.0, scale);
        const double r = std::pow(uniform01(), 1.0 / shape);
        const double y = x * r;
        return y > std::numeric_limits<double>::min() ? y : std::numeric_limits<double>::min();
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

std::uint64_t Stream::poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
        // Additivity of the Poisson law keeps Knuth's product away from underflow.
        const double half = mean / 2.0;
        return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform01();
    while (prod > limit) {
        ++k;
        prod *= uniform01();
    }
    return k;
}

}  // namespace mcarma::rng
