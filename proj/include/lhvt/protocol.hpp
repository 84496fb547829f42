#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhvt/bitio.hpp"
#include "lhvt/geometry.hpp"
#include "lhvt/lhv.hpp"

namespace lhvt {

class ProtocolError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The segment of [0, sqrt(3)] that u falls into, given the sender's state
// vector and one shared record. Half-open intervals; boundary ties go to the
// later zone.
enum class Zone { a_lambda, a_mu, a_nu, reject };

constexpr Axis zone_axis(Zone z) {
    return z == Zone::a_lambda ? Axis::lambda : (z == Zone::a_mu ? Axis::mu : Axis::nu);
}
constexpr Zone axis_zone(Axis l) {
    return l == Axis::lambda ? Zone::a_lambda : (l == Axis::mu ? Zone::a_mu : Zone::a_nu);
}

// Sign convention used throughout: sign(0) = +1.
constexpr int sign_of(double x) { return x < 0.0 ? -1 : +1; }

// The state the sender is asked to transmit (known to her only).
struct BlochState {
    UnitVec3 a;
};

// A two-outcome projective measurement, known to the receiver only.
struct VnMeasurement {
    UnitVec3 b;
};

// Everything that crosses the channel for one acceptance: the index of the
// first accepted record, which frame vector was accepted, and the sign of
// its overlap with the state.
struct AliceMessage {
    std::uint64_t k = 1;
    Axis label = Axis::lambda;
    int sign = +1;
};

// Generalized-measurement element, stored as its (not necessarily unit)
// vector; the weight is the vector's norm.
struct PovmElement {
    Vec3 bvec;
    double weight{};
};

struct Povm {
    std::vector<PovmElement> elements;

    static Povm from_vectors(std::span<const Vec3> vectors);
};

// Checks the completeness conditions (weights sum to 2, vectors sum to zero)
// and weight positivity, all within 1e-9. Returns a description of the first
// violated condition, or nullopt when valid.
std::optional<std::string> validate_povm(const Povm& p);

// Per-session bookkeeping for cost accounting.
struct SessionTranscript {
    std::vector<AliceMessage> messages;
    std::vector<int> replies;         // generalized-measurement loop only: 1,1,...,0
    std::uint64_t records_consumed{};  // highest record index examined
    std::uint64_t iterations{1};
    double ideal_bits{};               // filled by the cost layer
};

inline constexpr std::uint64_t default_iteration_cap = 1'000'000;

Zone zone_of(const BlochState& a, const LhvRecord& record);

struct AliceSelection {
    AliceMessage message;
    UnitVec3 accepted;
};

// Scans records from start_k for the first non-rejecting zone. The record
// source form exists so tests can inject hand-built record sequences.
template <class RecordFn>
AliceSelection alice_select_from(const BlochState& a, RecordFn&& record_at,
                                 std::uint64_t start_k = 1,
                                 std::uint64_t cap = default_iteration_cap) {
    for (std::uint64_t k = start_k; k < start_k + cap; ++k) {
        LhvRecord rec = record_at(k);
        Zone z = zone_of(a, rec);
        if (z == Zone::reject) continue;
        UnitVec3 v = rec.triplet.axis(zone_axis(z));
        return {AliceMessage{k, zone_axis(z), sign_of(dot(a.a, v))}, v};
    }
    throw ProtocolError("non-termination: iteration cap exceeded in acceptance scan");
}

AliceSelection alice_select(const BlochState& a, const LhvStream& stream,
                            std::uint64_t start_k = 1,
                            std::uint64_t cap = default_iteration_cap);

// The receiver's projective-measurement rule: reconstruct the accepted
// vector, flip it when the sign bit says the overlap was negative, output
// the sign of b against the flipped vector. Takes no state vector by
// construction.
int bob_vn_outcome(const VnMeasurement& b, const AliceMessage& msg, const LhvRecord& record_k);
int bob_vn_outcome(const VnMeasurement& b, const AliceMessage& msg, const LhvStream& stream);

struct VnResult {
    int outcome;  // +1 or -1
    SessionTranscript transcript;
};

VnResult run_vn_session(const BlochState& a, const VnMeasurement& b,
                        std::uint64_t session_seed_value,
                        std::uint64_t cap = default_iteration_cap);

// Bell-pair variant: the sender reports her own (anti-correlated) outcome,
// nothing is flipped, and no sign bit is transmitted.
struct SingletResult {
    int alpha;  // sender outcome
    int beta;   // receiver outcome
    SessionTranscript transcript;
};

SingletResult run_singlet_session(const BlochState& a, const VnMeasurement& b,
                                  std::uint64_t session_seed_value,
                                  std::uint64_t cap = default_iteration_cap);

// Two-way loop for generalized measurements: the receiver proposes an
// element with probability weight/2 from his private coin, accepts when its
// vector has non-negative overlap with the reconstructed frame vector, and
// otherwise sends a retry bit back.
struct PovmResult {
    std::size_t element;
    SessionTranscript transcript;
};

PovmResult run_povm_session(const BlochState& a, const Povm& p,
                            std::uint64_t session_seed_value,
                            std::uint64_t cap = default_iteration_cap);

// --- Naive wire format (uncoded baseline) ---------------------------------
//
// Message layout, MSB-first within bytes:
//   k     LEB128 varint (7-bit groups, low group first, 0x80 continuation),
//         each byte written as 8 bits
//   label 2 bits: 00 lambda, 01 mu, 10 nu
//   sign  1 bit: 0 = +1, 1 = -1
// A generalized-measurement reply is a single bit (0 accept, 1 retry).

void append_naive_message(BitWriter& out, const AliceMessage& msg);
AliceMessage read_naive_message(BitReader& in);
std::size_t naive_message_bits(const AliceMessage& msg);

}  // namespace lhvt
