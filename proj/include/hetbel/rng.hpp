#pragma once

// Counter-based random streams. Every variate is a pure function of
// (seed, path, step, channel), so paths can be generated in any order and
// parameter sweeps see identical noise.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hetbel {

/// Paths are simulated in blocks of this many lanes.
inline constexpr std::size_t kLanes = 64;
using Lane = Eigen::Array<double, static_cast<int>(kLanes), 1>;

/// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Independent noise channels drawn at every (path, step).
enum class Channel : int { W = 0, B = 1, Wmu = 2, Spare = 3 };

/// Counter word that separates the Gaussian block from other uses of the stream.
enum class StreamBlock : std::uint32_t { Gaussian = 0, Uniform = 1, Initial = 2 };

/// Maps a 32-bit integer to the open interval (0, 1).
constexpr double to_unit_open(std::uint32_t x) {
    return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
}

/// (cos 2 pi u, sin 2 pi u) for u in (0, 1), lane-wise.
/// Quarter-turn reduction is exact; Taylor polynomials on |x| <= pi/4 are
/// accurate to a few ulp.
inline void sincos_2pi(const Lane& u, Lane& c, Lane& s) {
    const Lane q = (4.0 * u).round();
    const Lane x = (u - 0.25 * q) * (2.0 * std::numbers::pi);
    const Lane x2 = x * x;
    Lane ps = Lane::Constant(1.0 / 1307674368000.0);  // 1/15!
    ps = ps * x2 * -1.0 + 1.0 / 6227020800.0;
    ps = ps * x2 * -1.0 + 1.0 / 39916800.0;
    ps = ps * x2 * -1.0 + 1.0 / 362880.0;
    ps = ps * x2 * -1.0 + 1.0 / 5040.0;
    ps = ps * x2 * -1.0 + 1.0 / 120.0;
    ps = ps * x2 * -1.0 + 1.0 / 6.0;
    ps = ps * x2 * -1.0 + 1.0;
    const Lane sr = x * ps;
    Lane pc = Lane::Constant(1.0 / 20922789888000.0);  // 1/16!
    pc = pc * x2 * -1.0 + 1.0 / 87178291200.0;
    pc = pc * x2 * -1.0 + 1.0 / 479001600.0;
    pc = pc * x2 * -1.0 + 1.0 / 3628800.0;
    pc = pc * x2 * -1.0 + 1.0 / 40320.0;
    pc = pc * x2 * -1.0 + 1.0 / 720.0;
    pc = pc * x2 * -1.0 + 1.0 / 24.0;
    pc = pc * x2 * -1.0 + 0.5;
    pc = pc * x2 * -1.0 + 1.0;
    const Lane& cr = pc;
    // angle = q * pi/2 + x, q in {0..4}
    c = (q == 1.0).select(-sr, (q == 2.0).select(-cr, (q == 3.0).select(sr, cr)));
    s = (q == 1.0).select(cr, (q == 2.0).select(-sr, (q == 3.0).select(-cr, sr)));
}

/// Four standard normals per lane, one array per channel.
struct GaussianLanes {
    std::array<Lane, 4> ch;
    const Lane& operator[](Channel c) const { return ch[static_cast<std::size_t>(c)]; }
};

/// Stream of variates for one simulation, keyed by the master seed.
class PathStream {
public:
    explicit constexpr PathStream(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Philox4x32::Counter raw(std::uint64_t path, std::uint64_t step, StreamBlock block) const {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(step),
                                      static_cast<std::uint32_t>(step >> 32) ^
                                          (static_cast<std::uint32_t>(block) << 28),
                                      static_cast<std::uint32_t>(path),
                                      static_cast<std::uint32_t>(path >> 32)};
        return Philox4x32::apply(ctr, key_);
    }

    /// Box-Muller normals for paths first .. first + kLanes - 1 at one step.
    /// `first` must be a multiple of kLanes; a path's normals never depend on
    /// which caller asks for them.
    void gaussians(std::uint64_t first, std::uint64_t step, GaussianLanes& out,
                   StreamBlock block = StreamBlock::Gaussian) const {
        Lane u0, u1, u2, u3;
        for (std::size_t l = 0; l < kLanes; ++l) {
            const auto r = raw(first + l, step, block);
            u0[l] = to_unit_open(r[0]);
            u1[l] = to_unit_open(r[1]);
            u2[l] = to_unit_open(r[2]);
            u3[l] = to_unit_open(r[3]);
        }
        Lane c, s;
        const Lane ra = (-2.0 * u0.log()).sqrt();
        sincos_2pi(u1, c, s);
        out.ch[0] = ra * c;
        out.ch[1] = ra * s;
        const Lane rb = (-2.0 * u2.log()).sqrt();
        sincos_2pi(u3, c, s);
        out.ch[2] = rb * c;
        out.ch[3] = rb * s;
    }

    /// The four normals of a single path (computed through its lane block).
    std::array<double, 4> normals(std::uint64_t path, std::uint64_t step,
                                  StreamBlock block = StreamBlock::Gaussian) const {
        GaussianLanes g;
        const std::uint64_t lane = path % kLanes;
        gaussians(path - lane, step, g, block);
        return {g.ch[0][lane], g.ch[1][lane], g.ch[2][lane], g.ch[3][lane]};
    }

    /// Uniform on (0,1) from the uniform block; `lane` selects one of four words.
    double uniform(std::uint64_t path, std::uint64_t step, int lane = 0) const {
        return to_unit_open(raw(path, step, StreamBlock::Uniform)[static_cast<std::size_t>(lane & 3)]);
    }

private:
    Philox4x32::Key key_;
};

}  // namespace hetbel
