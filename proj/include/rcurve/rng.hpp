#ifndef RCURVE_RNG_HPP
#define RCURVE_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rcurve {

/// xoshiro256++ stream seeded through splitmix64. Self-contained so that
/// uniform and normal draws are bit-identical across platforms; std
/// distributions make no such guarantee.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
        has_spare_ = false;
    }

    /// Independent substream keyed by (seed, k); used for per-path streams.
    static RngStream substream(std::uint64_t seed, std::uint64_t k) {
        std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
        std::uint64_t mixed = splitmix64(x) ^ (k * 0xbf58476d1ce4e5b9ULL + 0x2545f4914f6cdd1dULL);
        return RngStream(splitmix64(mixed) ^ k);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0,1); never returns 0 or 1.
    double uniform() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    /// Exponential with given rate via inverse CDF.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    /// Standard normal (polar Box-Muller, spare cached within the stream).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, r2;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rcurve

#endif
