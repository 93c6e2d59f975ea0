#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so results do not depend on evaluation order
// or thread count.

#include <cstdint>

namespace shearmix {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key for one independent stream.  `tag` separates unrelated uses of a seed.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t stream) {
    return mix64(mix64(mix64(seed) ^ tag) + stream);
}

inline constexpr std::uint64_t draw_bits(std::uint64_t key, std::uint64_t index) {
    return mix64(key ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
inline constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline constexpr double uniform01(std::uint64_t key, std::uint64_t index) {
    return to_unit(draw_bits(key, index));
}

/// Sequential view over one stream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t tag, std::uint64_t stream)
        : key_(stream_key(seed, tag, stream)) {}

    double uniform() { return uniform01(key_, counter_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream tags.
namespace tags {
inline constexpr std::uint64_t schedule = 0x5343484544ULL;
inline constexpr std::uint64_t initial = 0x494e4954ULL;
inline constexpr std::uint64_t witness = 0x574954ULL;
inline constexpr std::uint64_t multistart = 0x4d53ULL;
inline constexpr std::uint64_t pairs = 0x50414952ULL;
}  // namespace tags

}  // namespace shearmix
