#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cslab/core.hpp"

namespace cslab {

/// Deterministic random source.  Uniform doubles are produced from raw
/// 64-bit draws by a fixed bit recipe so that reports are reproducible
/// for a given seed independent of the standard library's distribution
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(raw() % n);
    }

    /// Log-uniform magnitude in [lo, hi], uniform phase.
    cx annulus(double lo, double hi) {
        double mag = lo * std::exp(unit() * std::log(hi / lo));
        double phase = uniform(0.0, 2.0 * M_PI);
        return std::polar(mag, phase);
    }

    /// Real draw with magnitude log-uniform in [lo, hi] and random sign.
    double signed_real(double lo, double hi) {
        double mag = lo * std::exp(unit() * std::log(hi / lo));
        return (raw() & 1) ? mag : -mag;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace cslab
