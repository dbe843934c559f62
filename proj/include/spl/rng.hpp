#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spl {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-addressable random stream: the pair (master_seed, stream_index)
/// fully determines the output sequence, and distinct stream indices give
/// statistically independent streams. Instances are single-owner; parallel
/// code derives one substream per task.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = detail::splitmix64(s);
        s = stream_index ^ 0xD1B54A32D192ED03ULL;
        std::uint64_t b = detail::splitmix64(s);
        engine_.seed(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    /// Substream for task i, addressed relative to this stream. Stream
    /// indices are partitioned as (index << 32) | i, so callers may derive
    /// up to 2^32 tasks per stream without collisions.
    RngStream substream(std::uint64_t i) const {
        return RngStream(master_seed_, (stream_index_ << 32) | (i & 0xFFFFFFFFULL));
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms per pair
    /// so the draw sequence is independent of the compiler's library.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace spl
