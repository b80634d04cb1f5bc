#ifndef DPRE_RNG_HPP
#define DPRE_RNG_HPP

// Counter-based randomness shared by the environment field, Monte Carlo
// walks and the synthetic-null samplers. Everything is a pure function of
// 64-bit words, so results do not depend on thread count or call order.

#include <cstdint>

namespace dpre {

// splitmix64 finalizer: a strong 64-bit avalanche.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Absorb one word into a running hash state.
inline std::uint64_t absorb(std::uint64_t h, std::uint64_t word) {
    return mix64(h ^ (word + kGolden));
}

// Uniform double in the open interval (0,1): 53-bit mantissa, bin centers,
// never exactly 0 or 1.
inline double u01(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
}

// Deterministic per-sample stream: seeded from (master_seed, tag, sample),
// advanced as a splitmix64 sequence. Streams with distinct seeds are
// independent for Monte Carlo purposes.
class SampleRng {
public:
    SampleRng(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t sample)
        : state_(absorb(absorb(mix64(master_seed ^ kGolden), tag), sample)) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    double next_u01() { return u01(next()); }

    // Uniform integer in [0, m) via multiply-high (m is tiny here; the
    // 2^-64-scale bias is irrelevant for Monte Carlo).
    std::uint64_t next_below(std::uint64_t m) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * m) >> 64);
    }

private:
    std::uint64_t state_;
};

} // namespace dpre

#endif
