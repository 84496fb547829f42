#pragma once

#include <cstdint>

#include "lhvt/geometry.hpp"
#include "lhvt/rng.hpp"

namespace lhvt {

// One entry of the shared randomness: an orthonormal frame plus a scalar
// uniform on [0, sqrt(3)).
struct LhvRecord {
    OrthoTriplet triplet;
    double u{};
};

// A deterministic, seed-replayable stream of records. record(k) is a pure
// function of (seed, k), so the receiving side can jump straight to the
// index named in a message without replaying the prefix.
class LhvStream {
public:
    explicit LhvStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t cursor() const { return cursor_; }

    // k >= 1. Pure; identical across all streams with the same seed.
    LhvRecord record(std::uint64_t k) const;

    // Returns record(cursor) and advances the cursor.
    LhvRecord next() { return record(cursor_++); }

private:
    std::uint64_t seed_;
    std::uint64_t cursor_ = 1;
};

inline LhvStream stream_new(std::uint64_t seed) { return LhvStream(seed); }

// Seed plumbing for a run of many sessions: session i of master seed S gets
// an independent derived seed, and within a session the shared record
// stream and Bob's private coin use distinct tags.
inline std::uint64_t session_seed(std::uint64_t master_seed, std::uint64_t session_index) {
    return derive_seed(master_seed, session_index, stream_tag::session);
}

inline LhvStream shared_stream(std::uint64_t session_seed_value) {
    return LhvStream(derive_seed(session_seed_value, 0, stream_tag::shared));
}

inline SplitMix64 bob_private_rng(std::uint64_t session_seed_value) {
    return SplitMix64(derive_seed(session_seed_value, 0, stream_tag::bob));
}

}  // namespace lhvt
