#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace macesim {

// splitmix64 finalizer, used for deriving sub-stream identifiers.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3").  One block turns a 128-bit counter and a
// 64-bit key into 128 output bits.  Streams are cheap: a stream is just a
// distinct (key, stream-id) pair, and the draw counter advances within it.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One logical random stream: Philox4x32-10 keyed by the run seed, with the
// 128-bit counter split into a 64-bit stream id (words 2,3) and a 64-bit
// draw counter (words 0,1).  All distributional draws are defined in terms
// of the 64-bit output sequence, so any implementation of the same scheme
// reproduces the exact values.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed)
        : RngStream(seed, splitmix64(seed)) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    // Child stream: same key, stream id re-derived from (id, tag) or
    // (id, tag, index) via splitmix64 chaining.
    [[nodiscard]] RngStream derive(std::uint64_t tag) const {
        return RngStream(seed_value(), splitmix64(stream_id_ ^ splitmix64(tag)));
    }
    [[nodiscard]] RngStream substream(std::uint64_t tag, std::uint64_t index) const {
        return derive(tag).derive(index);
    }

    std::uint64_t next_u64() {
        if (have_buffered_) {
            have_buffered_ = false;
            return buffered_;
        }
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(draw_counter_),
            static_cast<std::uint32_t>(draw_counter_ >> 32),
            static_cast<std::uint32_t>(stream_id_),
            static_cast<std::uint32_t>(stream_id_ >> 32)};
        ++draw_counter_;
        const auto out = Philox4x32::block(ctr, key_);
        buffered_ = (std::uint64_t(out[3]) << 32) | out[2];
        have_buffered_ = true;
        return (std::uint64_t(out[1]) << 32) | out[0];
    }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform index in {0, ..., n-1}.
    int index(int n) {
        const int v = static_cast<int>(uniform() * n);
        return v >= n ? n - 1 : v;
    }

    // +1 or -1, each with probability 1/2 (+1 when the uniform is < 0.5).
    int sign() { return uniform() < 0.5 ? +1 : -1; }

    // Circularly-symmetric complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    // Pair of independent real standard normals (Box-Muller).
    std::array<double, 2> normal_pair() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }

private:
    [[nodiscard]] std::uint64_t seed_value() const {
        return (std::uint64_t(key_[1]) << 32) | key_[0];
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_id_ = 0;
    std::uint64_t draw_counter_ = 0;
    std::uint64_t buffered_ = 0;
    bool have_buffered_ = false;
};

// Stream-derivation tags.  The harness derives, per realization r:
//   realization = root.substream(kTagRealization, r)
//   layout      = realization.derive(kTagLayout)
//   stats       = realization.derive(kTagStats)
//   block b     = realization.substream(kTagBlock, b), then
//     assignment = block.derive(kTagAssignment)
//     channels   = block.derive(kTagChannels)
//     noise      = block.derive(kTagNoise)
namespace rng_tag {
inline constexpr std::uint64_t kTagLayout = 0xA1;
inline constexpr std::uint64_t kTagStats = 0xA2;
inline constexpr std::uint64_t kTagRealization = 0xA3;
inline constexpr std::uint64_t kTagBlock = 0xB1;
inline constexpr std::uint64_t kTagAssignment = 0xC1;
inline constexpr std::uint64_t kTagChannels = 0xC2;
inline constexpr std::uint64_t kTagNoise = 0xC3;
}  // namespace rng_tag

}  // namespace macesim
