#pragma once

#include <cstdint>

namespace overton {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
// Used both as the generator output stage and to fold stream coordinates
// into seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for an independent stream addressed by (base, a, b, c). Every
// coordinate passes through mix64, so neighbouring coordinates land on
// unrelated streams. Pure integer arithmetic: identical on all platforms.
constexpr std::uint64_t derive_stream(std::uint64_t base, std::uint64_t a,
                                      std::uint64_t b, std::uint64_t c) noexcept {
    std::uint64_t s = mix64(base + kGoldenGamma);
    s = mix64(s ^ (a + kGoldenGamma));
    s = mix64(s ^ (b + kGoldenGamma));
    s = mix64(s ^ (c + kGoldenGamma));
    return s;
}

// Minimal splittable 64-bit generator. Not cryptographic; chosen for
// bit-reproducible streams across compilers and platforms.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_in(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased uniform integer in [0, n), n > 0. Rejection keeps the result
    // independent of how the modulus divides 2^64.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) {
                return r % n;
            }
        }
    }

  private:
    std::uint64_t state_;
};

}  // namespace overton
