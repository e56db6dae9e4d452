#pragma once

#include <cstdint>

namespace qhahn {

namespace detail {
// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
inline std::uint64_t sm_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Splittable counter-based generator. The draw at counter i is a pure
/// function of (key, i), so streams can be split hierarchically and a given
/// (seed, stream_id) always reproduces the same sequence. Substreams are
/// used to key Monte Carlo work by (path, particle, time) so that the law
/// of the first m particles does not depend on how many trail behind them.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(detail::sm_mix(detail::sm_mix(seed + 0x9e3779b97f4a7c15ull) ^
                              detail::sm_mix(stream_id + 0x632be59bd9b4e019ull))) {}

    /// Derive an independent stream; deterministic in (parent key, id).
    RngStream substream(std::uint64_t id) const {
        RngStream s;
        s.key_ = detail::sm_mix(key_ ^ detail::sm_mix(id + 0xd1b54a32d192ed03ull));
        return s;
    }

    std::uint64_t next_u64() {
        return detail::sm_mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ull);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1); never returns an exact endpoint.
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    RngStream() = default;
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

/// Stream for Monte Carlo worker w of a seeded run.
inline RngStream worker_stream(std::uint64_t seed, std::uint64_t worker_index) {
    return RngStream(seed, detail::sm_mix(worker_index + 0x2545f4914f6cdd1dull));
}

}  // namespace qhahn
