#pragma once

#include <cstdint>
#include <random>

namespace mfgp {

/// Seeded random source used by every stochastic operation in the engine.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// derives bounded integers and unit reals without std::uniform_*_distribution,
/// whose algorithms differ between standard libraries. Identical seeds therefore
/// reproduce identical runs on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform index in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n) {
        // multiply-high mapping; bias is O(n / 2^64), far below anything observable
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform_real() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace mfgp
