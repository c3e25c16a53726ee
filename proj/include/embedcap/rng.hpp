#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace embedcap {

// Deterministic random source. Every sampler in the library draws through
// this wrapper, so a fixed seed reproduces a Monte Carlo run bit for bit,
// independently of the standard library's distribution implementations.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : gen_(seed) {}

    // uniform on the open interval (0, 1)
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // unit-mean exponential
    double exponential() { return -std::log(uniform01()); }

    // standard normal, Box-Muller (consumes exactly two uniforms)
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Gamma(shape, scale 1), Marsaglia-Tsang; shape < 1 boosted via U^(1/shape)
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);  // sequenced before the boost draw
            return g * std::pow(uniform01(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / (3.0 * std::sqrt(d));
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace embedcap
