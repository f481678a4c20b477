#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace excut {

/// Philox4x64-10 keyed counter block cipher (Salmon et al., Random123).
/// Outputs match numpy.random.Philox(key=[key0, key1]).random_raw(); the
/// known-answer vectors live in the rng tests.
struct Philox4x64 {
    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                              std::array<std::uint64_t, 2> key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const unsigned __int128 p0 = (unsigned __int128)kMul0 * ctr[0];
            const unsigned __int128 p1 = (unsigned __int128)kMul1 * ctr[2];
            const std::uint64_t hi0 = std::uint64_t(p0 >> 64), lo0 = std::uint64_t(p0);
            const std::uint64_t hi1 = std::uint64_t(p1 >> 64), lo1 = std::uint64_t(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// One independent random stream per (seed, stream-id) key pair. Streams are
/// cheap to construct, never shared between replicas, and reproduce the same
/// sequence for the same key on every platform.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{seed, stream} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    /// Uniform on [0,1) with 53 random bits.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0,1); safe under log().
    double next_open() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) via the 128-bit multiply-shift map.
    std::uint64_t next_below(std::uint64_t bound) {
        return std::uint64_t(((unsigned __int128)next_u64() * bound) >> 64);
    }

    /// Standard normal, Marsaglia polar method with one cached value.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * scale;
        has_cached_ = true;
        return u * scale;
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang squeeze rejection; shapes below 1
    /// are boosted through Gamma(shape+1) * U^{1/shape}.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            const double g = next_gamma(shape + 1.0);
            return g * std::pow(next_open(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_open();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as a Gamma ratio.
    double next_beta(double a, double b) {
        const double g1 = next_gamma(a);
        const double g2 = next_gamma(b);
        const double s = g1 + g2;
        return s > 0.0 ? g1 / s : 0.5;
    }

private:
    void refill() {
        // numpy bumps the 256-bit counter before each block; match it so the
        // published known-answer vectors apply verbatim.
        for (int i = 0; i < 4; ++i) {
            if (++ctr_[i] != 0) break;
        }
        buf_ = Philox4x64::block(ctr_, key_);
        pos_ = 0;
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Replica streams: statistically independent for distinct replica indices
/// under a shared master seed.
inline RandomStream seed_stream(std::uint64_t master, std::uint64_t replica) {
    return RandomStream(master, replica);
}

/// Stream-id namespaces so that distinct uses inside one experiment never
/// consume the same stream (replica workers, oracle samplers, ...).
namespace stream_ns {
constexpr std::uint64_t replica = 0;
constexpr std::uint64_t oracle = std::uint64_t(1) << 56;
constexpr std::uint64_t sampler = std::uint64_t(2) << 56;
constexpr std::uint64_t aux = std::uint64_t(3) << 56;
}  // namespace stream_ns

}  // namespace excut
