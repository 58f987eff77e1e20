#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace cqalog {

/// Deterministic 64-bit generator (splitmix64). The standard library engines
/// are portable but its distributions are not, so bounded draws are done here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n). n must be > 0. Rejection keeps the draw exact.
    std::uint64_t bounded(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Sub-seed derivation: every random decision in the pipeline draws from a
/// seed mixed from the global seed, a stage tag, and up to two item ids.
/// This keeps results independent of scheduling and iteration order.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stage, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
    std::uint64_t h = fnv1a64(stage);
    h = fnv1a64_u64(base, h);
    h = fnv1a64_u64(a, h);
    h = fnv1a64_u64(b, h);
    // splitmix finalizer to spread low-entropy inputs
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

}  // namespace cqalog
