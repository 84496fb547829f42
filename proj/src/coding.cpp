#include "lhvt/coding.hpp"

#include <algorithm>
#include <cstring>

#include "lhvt/bitio.hpp"

namespace lhvt {

namespace {

constexpr std::uint64_t kHalf = 0x80000000ull;
constexpr std::uint64_t kQuarter = 0x40000000ull;
constexpr std::uint64_t kThreeQuarters = 0xC0000000ull;
constexpr std::uint64_t kTopMask = 0xFFFFFFFFull;
constexpr std::uint32_t kTotal = 1u << 16;

// 32-bit arithmetic coder with pending-bit (E3) renormalization.
class ArithmeticEncoder {
public:
    explicit ArithmeticEncoder(BitWriter& out) : out_(out) {}

    void encode(std::uint32_t cum_lo, std::uint32_t cum_hi) {
        std::uint64_t range = high_ - low_ + 1;
        high_ = low_ + range * cum_hi / kTotal - 1;
        low_ = low_ + range * cum_lo / kTotal;
        for (;;) {
            if (high_ < kHalf) {
                emit(0);
            } else if (low_ >= kHalf) {
                emit(1);
                low_ -= kHalf;
                high_ -= kHalf;
            } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
                ++pending_;
                low_ -= kQuarter;
                high_ -= kQuarter;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
        }
    }

    void finish() {
        ++pending_;
        emit(low_ >= kQuarter ? 1 : 0);
    }

private:
    void emit(int bit) {
        out_.put(bit);
        while (pending_ > 0) {
            out_.put(!bit);
            --pending_;
        }
    }

    BitWriter& out_;
    std::uint64_t low_ = 0;
    std::uint64_t high_ = kTopMask;
    std::uint64_t pending_ = 0;
};

class ArithmeticDecoder {
public:
    explicit ArithmeticDecoder(BitReader& in) : in_(in) {
        for (int i = 0; i < 32; ++i) value_ = (value_ << 1) | static_cast<unsigned>(in_.get());
    }

    std::uint32_t target() const {
        std::uint64_t range = high_ - low_ + 1;
        return static_cast<std::uint32_t>(((value_ - low_ + 1) * kTotal - 1) / range);
    }

    void consume(std::uint32_t cum_lo, std::uint32_t cum_hi) {
        std::uint64_t range = high_ - low_ + 1;
        high_ = low_ + range * cum_hi / kTotal - 1;
        low_ = low_ + range * cum_lo / kTotal;
        for (;;) {
            if (high_ < kHalf) {
                // nothing
            } else if (low_ >= kHalf) {
                low_ -= kHalf;
                high_ -= kHalf;
                value_ -= kHalf;
            } else if (low_ >= kQuarter && high_ < kThreeQuarters) {
                low_ -= kQuarter;
                high_ -= kQuarter;
                value_ -= kQuarter;
            } else {
                break;
            }
            low_ <<= 1;
            high_ = (high_ << 1) | 1;
            value_ = (value_ << 1) | static_cast<unsigned>(in_.get());
        }
    }

private:
    BitReader& in_;
    std::uint64_t low_ = 0;
    std::uint64_t high_ = kTopMask;
    std::uint64_t value_ = 0;
};

constexpr std::size_t symbol_index(Zone z) { return static_cast<std::size_t>(z); }

// True (unquantized) feasibility of a zone at this u; the quantization floor
// keeps impossible symbols encodable, so feasibility is checked explicitly.
bool zone_feasible(Zone z, double u) {
    if (ZoneProbTable::shared().prob(z, u) > 1e-9) return true;
    return zone_prob_given_u(z, u) > 0.0;
}

std::array<std::uint32_t, 5> cumulative(const std::array<std::uint32_t, 4>& counts) {
    std::array<std::uint32_t, 5> cum{};
    for (std::size_t i = 0; i < 4; ++i) cum[i + 1] = cum[i] + counts[i];
    return cum;
}

void append_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint64_t read_u64_le(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

struct PayloadResult {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bits;
};

PayloadResult encode_payload(std::span<const AliceMessage> messages, const StreamAccess& streams) {
    BitWriter writer;
    if (!messages.empty()) {
        ArithmeticEncoder enc(writer);
        for (std::size_t s = 0; s < messages.size(); ++s) {
            const AliceMessage& msg = messages[s];
            if (msg.k < 1) throw CodingError("message has invalid index k = 0");
            LhvStream stream = streams(s);
            for (std::uint64_t k = 1; k <= msg.k; ++k) {
                double u = stream.record(k).u;
                Zone z = k == msg.k ? axis_zone(msg.label) : Zone::reject;
                if (!zone_feasible(z, u)) {
                    throw CodingError("message inconsistent with stream: impossible zone at k=" +
                                      std::to_string(k));
                }
                auto cum = cumulative(quantized_zone_counts(u));
                std::size_t i = symbol_index(z);
                enc.encode(cum[i], cum[i + 1]);
            }
        }
        enc.finish();
    }
    std::uint64_t bits = writer.bit_count();
    return {writer.take(), bits};
}

}  // namespace

StreamAccess streams_for_master(std::uint64_t master_seed) {
    return [master_seed](std::size_t i) { return shared_stream(session_seed(master_seed, i)); };
}

std::array<std::uint32_t, 4> quantized_zone_counts(double u) {
    std::array<double, 4> p = ZoneProbTable::shared().pmf(u);
    std::array<std::uint32_t, 4> counts{};
    std::uint64_t sum = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        auto c = static_cast<std::uint32_t>(
            std::max<std::int64_t>(1, std::llround(p[i] * static_cast<double>(kTotal))));
        counts[i] = c;
        sum += c;
        if (c > counts[largest]) largest = i;
    }
    // Force the total to exactly 2^16 by adjusting the dominant symbol.
    auto diff = static_cast<std::int64_t>(kTotal) - static_cast<std::int64_t>(sum);
    counts[largest] = static_cast<std::uint32_t>(static_cast<std::int64_t>(counts[largest]) + diff);
    return counts;
}

std::vector<std::uint8_t> CodedBlock::serialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(21 + payload.size() + sign_bits.size());
    out.push_back('L');
    out.push_back('H');
    out.push_back('V');
    out.push_back('T');
    out.push_back(0x01);
    append_u64_le(out, n_sessions);
    append_u64_le(out, payload_bits);
    out.insert(out.end(), payload.begin(), payload.end());
    out.insert(out.end(), sign_bits.begin(), sign_bits.end());
    return out;
}

CodedBlock CodedBlock::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 21) throw CodingError("block truncated: header incomplete");
    if (bytes[0] != 'L' || bytes[1] != 'H' || bytes[2] != 'V' || bytes[3] != 'T') {
        throw CodingError("bad magic bytes");
    }
    if (bytes[4] != 0x01) throw CodingError("unsupported format version");
    CodedBlock b;
    b.n_sessions = read_u64_le(bytes.data() + 5);
    b.payload_bits = read_u64_le(bytes.data() + 13);
    std::uint64_t payload_bytes = (b.payload_bits + 7) / 8;
    std::uint64_t sign_bytes = (b.n_sessions + 7) / 8;
    if (bytes.size() != 21 + payload_bytes + sign_bytes) {
        throw CodingError("block size mismatch");
    }
    b.payload.assign(bytes.begin() + 21, bytes.begin() + 21 + static_cast<std::ptrdiff_t>(payload_bytes));
    b.sign_bits.assign(bytes.begin() + 21 + static_cast<std::ptrdiff_t>(payload_bytes), bytes.end());
    return b;
}

CodedBlock encode_block(std::span<const AliceMessage> messages, const StreamAccess& streams) {
    CodedBlock block;
    block.n_sessions = messages.size();
    PayloadResult payload = encode_payload(messages, streams);
    block.payload = std::move(payload.bytes);
    block.payload_bits = payload.bits;
    block.sign_bits.assign((messages.size() + 7) / 8, 0);
    for (std::size_t s = 0; s < messages.size(); ++s) {
        if (messages[s].sign < 0) {
            block.sign_bits[s >> 3] |= static_cast<std::uint8_t>(1u << (7 - (s & 7)));
        }
    }
    return block;
}

std::vector<AliceMessage> decode_block(const CodedBlock& block, const StreamAccess& streams) {
    if (block.payload.size() != (block.payload_bits + 7) / 8) {
        throw CodingError("payload length inconsistent with bit count");
    }
    if (block.sign_bits.size() < (block.n_sessions + 7) / 8) {
        throw CodingError("sign bits truncated");
    }
    std::vector<AliceMessage> messages;
    messages.reserve(block.n_sessions);
    if (block.n_sessions > 0) {
        BitReader reader(block.payload.data(), block.payload_bits);
        ArithmeticDecoder dec(reader);
        for (std::uint64_t s = 0; s < block.n_sessions; ++s) {
            LhvStream stream = streams(s);
            AliceMessage msg;
            for (std::uint64_t k = 1;; ++k) {
                if (k > default_iteration_cap) {
                    throw CodingError("decode exceeded iteration cap: model mismatch?");
                }
                double u = stream.record(k).u;
                auto counts = quantized_zone_counts(u);
                auto cum = cumulative(counts);
                std::uint32_t target = dec.target();
                std::size_t i = 0;
                while (i < 3 && target >= cum[i + 1]) ++i;
                dec.consume(cum[i], cum[i + 1]);
                Zone z = static_cast<Zone>(i);
                if (!zone_feasible(z, u)) {
                    throw CodingError("decoded impossible zone: seed/model mismatch");
                }
                if (z == Zone::reject) continue;
                msg.k = k;
                msg.label = zone_axis(z);
                break;
            }
            msg.sign = (block.sign_bits[s >> 3] >> (7 - (s & 7))) & 1 ? -1 : +1;
            messages.push_back(msg);
        }
    }
    // A wrong seed or corrupted payload almost surely fails to reproduce the
    // exact payload on re-encoding.
    PayloadResult check = encode_payload(messages, streams);
    if (check.bits != block.payload_bits || check.bytes != block.payload) {
        throw CodingError("payload does not re-encode identically: seed/model mismatch");
    }
    return messages;
}

}  // namespace lhvt
