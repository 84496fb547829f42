#include "lhvt/protocol.hpp"

#include <cmath>
#include <cstdio>

namespace lhvt {

Zone zone_of(const BlochState& a, const LhvRecord& record) {
    double c1 = std::abs(dot(a.a, record.triplet.lambda));
    double c2 = std::abs(dot(a.a, record.triplet.mu));
    double c3 = std::abs(dot(a.a, record.triplet.nu));
    double u = record.u;
    double t = c1;
    if (u < t) return Zone::a_lambda;
    t += c2;
    if (u < t) return Zone::a_mu;
    t += c3;
    if (u < t) return Zone::a_nu;
    return Zone::reject;
}

AliceSelection alice_select(const BlochState& a, const LhvStream& stream,
                            std::uint64_t start_k, std::uint64_t cap) {
    return alice_select_from(
        a, [&stream](std::uint64_t k) { return stream.record(k); }, start_k, cap);
}

int bob_vn_outcome(const VnMeasurement& b, const AliceMessage& msg, const LhvRecord& record_k) {
    UnitVec3 v = record_k.triplet.axis(msg.label);
    UnitVec3 flipped = msg.sign < 0 ? v.flipped() : v;
    return sign_of(dot(b.b, flipped));
}

int bob_vn_outcome(const VnMeasurement& b, const AliceMessage& msg, const LhvStream& stream) {
    return bob_vn_outcome(b, msg, stream.record(msg.k));
}

VnResult run_vn_session(const BlochState& a, const VnMeasurement& b,
                        std::uint64_t session_seed_value, std::uint64_t cap) {
    LhvStream alice_stream = shared_stream(session_seed_value);
    AliceSelection sel = alice_select(a, alice_stream, 1, cap);
    // Bob owns his own copy of the stream, reconstructed from the seed.
    LhvStream bob_stream = shared_stream(session_seed_value);
    int outcome = bob_vn_outcome(b, sel.message, bob_stream);
    SessionTranscript t;
    t.messages.push_back(sel.message);
    t.records_consumed = sel.message.k;
    t.iterations = 1;
    return {outcome, std::move(t)};
}

SingletResult run_singlet_session(const BlochState& a, const VnMeasurement& b,
                                  std::uint64_t session_seed_value, std::uint64_t cap) {
    LhvStream alice_stream = shared_stream(session_seed_value);
    AliceSelection sel = alice_select(a, alice_stream, 1, cap);
    int alpha = -sign_of(dot(a.a, sel.accepted));
    // Bob reconstructs the accepted vector but does not flip it; only (k, l)
    // was communicated.
    LhvStream bob_stream = shared_stream(session_seed_value);
    UnitVec3 v = bob_stream.record(sel.message.k).triplet.axis(sel.message.label);
    int beta = sign_of(dot(b.b, v));
    SessionTranscript t;
    t.messages.push_back(sel.message);
    t.records_consumed = sel.message.k;
    t.iterations = 1;
    return {alpha, beta, std::move(t)};
}

Povm Povm::from_vectors(std::span<const Vec3> vectors) {
    Povm p;
    p.elements.reserve(vectors.size());
    for (const Vec3& v : vectors) p.elements.push_back({v, norm(v)});
    return p;
}

std::optional<std::string> validate_povm(const Povm& p) {
    constexpr double tol = 1e-9;
    if (p.elements.size() < 2) {
        return "fewer than 2 elements";
    }
    double weight_sum = 0.0;
    Vec3 vec_sum{};
    for (std::size_t j = 0; j < p.elements.size(); ++j) {
        const PovmElement& e = p.elements[j];
        if (!(e.weight > 0.0)) {
            return "element " + std::to_string(j) + " has non-positive weight";
        }
        if (std::abs(e.weight - norm(e.bvec)) > tol) {
            return "element " + std::to_string(j) + " weight does not equal vector norm";
        }
        weight_sum += e.weight;
        vec_sum = vec_sum + e.bvec;
    }
    if (std::abs(weight_sum - 2.0) > tol) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "weight sum %.12g != 2", weight_sum);
        return std::string(buf);
    }
    if (std::abs(vec_sum.x) > tol || std::abs(vec_sum.y) > tol || std::abs(vec_sum.z) > tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "vector sum nonzero (%.3g, %.3g, %.3g)", vec_sum.x,
                      vec_sum.y, vec_sum.z);
        return std::string(buf);
    }
    return std::nullopt;
}

namespace {

std::size_t draw_povm_element(const Povm& p, SplitMix64& coin) {
    double d = 2.0 * coin.next_unit();  // weights sum to 2
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < p.elements.size(); ++j) {
        acc += p.elements[j].weight;
        if (d < acc) return j;
    }
    return p.elements.size() - 1;
}

}  // namespace

PovmResult run_povm_session(const BlochState& a, const Povm& p,
                            std::uint64_t session_seed_value, std::uint64_t cap) {
    if (auto err = validate_povm(p)) {
        throw std::invalid_argument("invalid POVM: " + *err);
    }
    LhvStream alice_stream = shared_stream(session_seed_value);
    LhvStream bob_stream = shared_stream(session_seed_value);
    SplitMix64 coin = bob_private_rng(session_seed_value);

    SessionTranscript t;
    std::uint64_t start_k = 1;
    for (std::uint64_t iter = 1; iter <= cap; ++iter) {
        AliceSelection sel = alice_select(a, alice_stream, start_k, cap);
        t.messages.push_back(sel.message);
        t.records_consumed = sel.message.k;
        t.iterations = iter;

        UnitVec3 v = bob_stream.record(sel.message.k).triplet.axis(sel.message.label);
        UnitVec3 flipped = sel.message.sign < 0 ? v.flipped() : v;
        std::size_t j = draw_povm_element(p, coin);
        if (dot(flipped, p.elements[j].bvec) >= 0.0) {
            t.replies.push_back(0);
            return {j, std::move(t)};
        }
        t.replies.push_back(1);
        start_k = sel.message.k + 1;
    }
    throw ProtocolError("non-termination: iteration cap exceeded in two-way loop");
}

void append_naive_message(BitWriter& out, const AliceMessage& msg) {
    std::uint64_t v = msg.k;
    do {
        std::uint8_t group = static_cast<std::uint8_t>(v & 0x7Fu);
        v >>= 7;
        out.put_byte(v ? static_cast<std::uint8_t>(group | 0x80u) : group);
    } while (v);
    int label = msg.label == Axis::lambda ? 0 : (msg.label == Axis::mu ? 1 : 2);
    out.put((label >> 1) & 1);
    out.put(label & 1);
    out.put(msg.sign < 0 ? 1 : 0);
}

AliceMessage read_naive_message(BitReader& in) {
    std::uint64_t k = 0;
    int shift = 0;
    for (;;) {
        std::uint8_t byte = in.get_byte();
        k |= static_cast<std::uint64_t>(byte & 0x7Fu) << shift;
        if (!(byte & 0x80u)) break;
        shift += 7;
        if (shift > 63) throw ProtocolError("varint overflow in naive message");
    }
    int label = (in.get() << 1) | in.get();
    if (label > 2) throw ProtocolError("bad label in naive message");
    int sign = in.get() ? -1 : +1;
    return {k, label == 0 ? Axis::lambda : (label == 1 ? Axis::mu : Axis::nu), sign};
}

std::size_t naive_message_bits(const AliceMessage& msg) {
    std::size_t groups = 1;
    std::uint64_t v = msg.k >> 7;
    while (v) {
        ++groups;
        v >>= 7;
    }
    return groups * 8 + 3;
}

}  // namespace lhvt
