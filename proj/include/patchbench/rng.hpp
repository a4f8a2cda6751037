#pragma once

#include <cmath>
#include <cstdint>

namespace patchbench {

/// Finalizer of the splitmix64 generator (Vigna). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the seed of an independent substream from a base seed and up to
/// three structural labels (sequence index, region id, ...). The derivation
/// depends only on its arguments, never on stream position, so substreams
/// are identical no matter how work is scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0)
{
    std::uint64_t s = mix64(base + 0x9e3779b97f4a7c15ULL);
    s = mix64(s ^ (a + 0xbf58476d1ce4e5b9ULL));
    s = mix64(s ^ (b + 0x94d049bb133111ebULL));
    s = mix64(s ^ (c + 0x2545f4914f6cdd1dULL));
    return s;
}

/// Small deterministic random stream (splitmix64 core). All randomness in
/// the library flows through explicit instances of this class; there is no
/// hidden global state.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi). Degenerate interval (lo == hi) returns lo exactly.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift reduction.
    int uniform_int(int n)
    {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    /// Standard normal via Box-Muller (stateless variant, two draws per call).
    double normal()
    {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace patchbench
