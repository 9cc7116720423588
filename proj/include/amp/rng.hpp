#pragma once

#include <cmath>
#include <cstdint>

// Deterministic uniform substreams. Every consumer of randomness derives its
// own stream from (master seed, stream id, purpose), so results do not depend
// on how work is split across threads.

namespace amp {

namespace detail {
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

enum class StreamPurpose : uint64_t {
    durations = 1,
    rates = 2,
    snapshots = 3,
    monte_carlo = 4,
    noise = 5,
};

class UniformStream {
  public:
    UniformStream(uint64_t master, uint64_t stream_id, StreamPurpose purpose) {
        // scramble each key component through the mixer so nearby seeds and
        // ids land in unrelated states
        uint64_t s = master;
        state_ = detail::splitmix64(s);
        s = state_ ^ (0x517cc1b727220a95ULL * (stream_id + 1));
        state_ = detail::splitmix64(s);
        s = state_ ^ (0x2545f4914f6cdd1dULL * static_cast<uint64_t>(purpose));
        state_ = detail::splitmix64(s);
    }

    uint64_t next_u64() { return detail::splitmix64(state_); }

    // strictly inside (0,1): top 53 bits shifted to the half-open lattice
    double next_double() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // deterministic standard normal (Box-Muller); used by test fixtures and
    // the white-noise reference paths
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace amp
