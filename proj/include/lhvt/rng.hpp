#pragma once

#include <cstdint>

namespace lhvt {

// Counter-friendly 64-bit generator (splitmix64). Period 2^64, passes
// BigCrush, and cheap enough to reseed per record, which is what gives the
// shared-variable streams their random-access property.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Fixed mixing function for deriving independent sub-seeds from
// (seed, index, tag). Two avalanche rounds over the xor-combined words;
// documented so that runs are reproducible under any scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag) {
    auto avalanche = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    std::uint64_t h = avalanche(seed + 0x9E3779B97F4A7C15ull);
    h = avalanche(h ^ (index + 0xD1B54A32D192ED03ull));
    h = avalanche(h ^ (tag + 0x8CB92BA72F3D8DD7ull));
    return h;
}

namespace stream_tag {
// Session-level derivation from a master seed.
inline constexpr std::uint64_t session = 0x5E5510Aull;
// Within one session: the shared record stream and Bob's private coin.
inline constexpr std::uint64_t shared = 0x54A4EDull;
inline constexpr std::uint64_t bob = 0xB0Bull;
// Per-record keying inside one shared stream.
inline constexpr std::uint64_t record = 0x4EC04Dull;
// Auxiliary draws in the harness (random a/b vectors).
inline constexpr std::uint64_t vectors = 0xABCDull;
}  // namespace stream_tag

inline constexpr const char* generator_name = "splitmix64-keyed";

}  // namespace lhvt
