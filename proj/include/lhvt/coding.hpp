#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lhvt/cost.hpp"
#include "lhvt/lhv.hpp"
#include "lhvt/protocol.hpp"

namespace lhvt {

class CodingError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decoder-side access to the same per-session shared streams the encoder saw.
using StreamAccess = std::function<LhvStream(std::size_t session_index)>;

// The convention used by the harness: session i of a master seed.
StreamAccess streams_for_master(std::uint64_t master_seed);

// Per-record coding distribution over the four zone symbols, derived from u.
// Probabilities are quantized to 16-bit fixed point with a floor of one count
// per symbol; encoder and decoder run the identical quantization.
std::array<std::uint32_t, 4> quantized_zone_counts(double u);

// A coded batch of messages. Payload is the arithmetic-coded zone-symbol
// stream; sign bits ride uncoded (conditioned on acceptance they are fair
// coin flips, independent of the receiver's side information).
//
// Serialized layout:
//   magic "LHVT", version byte 0x01,
//   n_sessions          u64 little-endian,
//   payload bit length  u64 little-endian,
//   payload bytes (final byte zero-padded),
//   packed sign bits, one per session, MSB-first (0 = +1).
struct CodedBlock {
    std::uint64_t n_sessions{};
    std::uint64_t payload_bits{};
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> sign_bits;

    std::vector<std::uint8_t> serialize() const;
    static CodedBlock deserialize(std::span<const std::uint8_t> bytes);
};

// Arithmetic-codes the zone symbols of each session (reject ... reject,
// accept-label) against the shared-stream model. Messages inconsistent with
// their stream (a zone that is impossible at the recorded u) raise
// CodingError.
CodedBlock encode_block(std::span<const AliceMessage> messages, const StreamAccess& streams);

// Exact inverse given the same streams. Raises CodingError on truncated or
// mismatched input; a wrong seed is caught (with overwhelming probability)
// by re-encoding the decoded messages and comparing payloads.
std::vector<AliceMessage> decode_block(const CodedBlock& block, const StreamAccess& streams);

}  // namespace lhvt
