#pragma once

#include <cstdint>
#include <random>

namespace cpld {

// Mixes a 64-bit value (splitmix64 finalizer). Used to derive well-spread
// engine seeds from (master seed, stream index) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic seed for substream `index` of `master`. Stable across
// platforms and worker counts.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ (index * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull));
}

// Random stream owned by exactly one worker at a time. Substreams indexed by
// (master seed, index) are independent of how many other streams exist, which
// makes parallel Monte Carlo output independent of the worker count.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(mix64(seed)) {}

    static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
        return RandomStream(derive_seed(master_seed, index));
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Strictly positive exponential draw with the given mean.
    double exponential(double mean) {
        const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        return -mean * std::log(u);
    }

    double gamma(double shape, double scale) {
        std::gamma_distribution<double> dist(shape, scale);
        return dist(engine_);
    }

    std::uint64_t raw() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace cpld
