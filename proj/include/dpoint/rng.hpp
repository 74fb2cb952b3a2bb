#pragma once

#include <cstdint>
#include <random>

namespace dpoint {

/// Deterministic per-run random stream: identical (seed, stream) pairs yield
/// identical draw sequences, distinct streams are decorrelated by splitmix64
/// mixing.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(mix(seed) ^ (mix(stream + 0x9e3779b97f4a7c15ULL)))) {}

    /// Uniform integer in [0, n).
    int uniform_index(int n) {
        std::uniform_int_distribution<int> dist(0, n - 1);
        return dist(engine_);
    }

    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) {
        std::uniform_real_distribution<double> dist(lo, hi);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace dpoint
