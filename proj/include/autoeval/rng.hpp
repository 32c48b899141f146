#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace autoeval {

// Counter-based generator: output i is a pure function of (seed, stream, i).
// Independent streams make fan-out order-independent -- every sample set,
// held-out set, and fit owns its own stream id, so results do not depend on
// how work is scheduled across threads.
//
// Stream id ranges used across the project:
//   0 .. 2^20      meta-dataset record index
//   kStreamHeldOut + i   held-out evaluation sets
//   kStreamRobust + i    robustness-suite sets
//   kStreamSplit, kStreamClassifier, kStreamNeural, ...  fixed singletons
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(derive_key(seed, stream)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (counter_++) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1). 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n). Lemire multiply-shift; biasless enough for
    // our n (all far below 2^32) and, unlike std distributions, identical on
    // every standard library.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller. Stateless between calls (no cached
    // spare) so a draw count is easy to reason about.
    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Fisher-Yates. std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(xs[i - 1], xs[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Fixed singleton stream ids (record indexes occupy the low range).
inline constexpr std::uint64_t kStreamSplit = 0xA000000000000001ull;
inline constexpr std::uint64_t kStreamClassifier = 0xA000000000000002ull;
inline constexpr std::uint64_t kStreamNeural = 0xA000000000000003ull;
inline constexpr std::uint64_t kStreamSeedSet = 0xA000000000000004ull;
inline constexpr std::uint64_t kStreamTrainSet = 0xA000000000000005ull;
inline constexpr std::uint64_t kStreamTextures = 0xA000000000000006ull;
inline constexpr std::uint64_t kStreamHeldOut = 0x0000000000100000ull;
inline constexpr std::uint64_t kStreamRobust = 0x0000000000200000ull;

}  // namespace autoeval
