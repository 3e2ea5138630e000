#pragma once

#include <cstdint>
#include <random>

namespace mcarma::rng {

/// One step of the SplitMix64 sequence; advances `state` and returns the output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives a stream seed from a master seed and two keys.  The derivation is a
/// pure function of (master, key_a, key_b), so parallel workers obtain
/// reproducible, order-independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t key_a, std::uint64_t key_b);

/// Bit pattern of a double, usable as a derivation key.
std::uint64_t double_bits(double x);

/// A self-contained random stream.  All distributions are implemented on top
/// of mt19937_64 so that results are identical across standard libraries and
/// across runs with the same seed.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : eng_(seed) {}

    /// Uniform draw in the open interval (0,1).
    double uniform01();

    /// Standard normal via the Marsaglia polar method (spare cached).
    double normal();

    /// Gamma(shape, scale) via Marsaglia-Tsang, with the power boost for
    /// shape < 1.  Draws are clamped to the smallest positive normal double
    /// so that subordinator increments stay strictly positive under
    /// underflow at very small shapes.
    double gamma(double shape, double scale);

    /// Poisson(mean) by Knuth multiplication; means above 30 are split
    /// additively to keep the product well-conditioned.
    std::uint64_t poisson(double mean);

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mcarma::rng
