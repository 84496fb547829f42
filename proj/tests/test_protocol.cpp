#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <vector>

#include <doctest.h>

#include "lhvt/protocol.hpp"

using namespace lhvt;

namespace {

LhvRecord make_record(UnitVec3 l, UnitVec3 m, UnitVec3 n, double u) {
    return LhvRecord{OrthoTriplet{l, m, n}, u};
}

// Independent oracle for the singlet correlator: the accepted vector has
// density |a.v| / (2pi) on the sphere, so
//   E[alpha beta] = -Integral dv |a.v|/(2pi) sign(a.v) sign(b.v).
// With a on the pole and b at polar angle gamma, the azimuth integral of
// sign(b.v) is 4*acos(clamp(-B/A)) - 2pi with A = sin(gamma) sin(theta),
// B = cos(gamma) cos(theta), leaving a smooth 1D integral in theta.
double singlet_correlator_oracle(double a_dot_b) {
    const double gamma = std::acos(std::clamp(a_dot_b, -1.0, 1.0));
    const double sg = std::sin(gamma), cg = std::cos(gamma);
    const int n = 200'001;  // Simpson, odd count
    const double h = std::numbers::pi / (n - 1);
    auto f = [&](double theta) {
        double st = std::sin(theta), ct = std::cos(theta);
        double A = sg * st, B = cg * ct;
        double arg = A > 1e-15 ? std::clamp(-B / A, -1.0, 1.0) : (B >= 0.0 ? -1.0 : 1.0);
        double phi_signed = 4.0 * std::acos(arg) - 2.0 * std::numbers::pi;
        return st * ct * phi_signed;  // |cos| * sign(cos) = cos
    };
    double sum = f(0.0) + f(std::numbers::pi);
    for (int i = 1; i < n - 1; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return -(h / 3.0) * sum / (2.0 * std::numbers::pi);
}

Povm trine_povm() {
    const double w = 2.0 / 3.0;
    const std::array<Vec3, 3> vs{Vec3{w, 0, 0}, Vec3{-w / 2, w * sqrt3 / 2, 0},
                                 Vec3{-w / 2, -w * sqrt3 / 2, 0}};
    return Povm::from_vectors(vs);
}

}  // namespace

// Bob's interface cannot accept the sender's state by construction.
static_assert(!std::is_convertible_v<BlochState, VnMeasurement>);
static_assert(!std::is_constructible_v<VnMeasurement, BlochState>);
static_assert(!std::is_convertible_v<BlochState, UnitVec3>);

TEST_SUITE("protocol") {

TEST_CASE("zone classification follows the cumulative thresholds") {
    BlochState a{z_axis};
    // thresholds 1, 1, 1 for triplet (z, x, y)
    CHECK(zone_of(a, make_record(z_axis, x_axis, y_axis, 0.5)) == Zone::a_lambda);
    CHECK(zone_of(a, make_record(z_axis, x_axis, y_axis, 1.0)) == Zone::reject);
    // a = (1,1,1)/sqrt3 against the canonical frame: thresholds at
    // 0.5774, 1.1547, 1.7321
    BlochState diag{normalized(Vec3{1, 1, 1})};
    CHECK(zone_of(diag, make_record(x_axis, y_axis, z_axis, 1.0)) == Zone::a_mu);
    CHECK(zone_of(diag, make_record(x_axis, y_axis, z_axis, 0.5)) == Zone::a_lambda);
    CHECK(zone_of(diag, make_record(x_axis, y_axis, z_axis, 1.2)) == Zone::a_nu);
}

TEST_CASE("alice accepts the first non-rejecting record") {
    BlochState a{z_axis};
    std::vector<LhvRecord> recs{make_record(z_axis, x_axis, y_axis, 0.5)};
    auto sel = alice_select_from(a, [&](std::uint64_t k) { return recs.at(k - 1); });
    CHECK(sel.message.k == 1);
    CHECK(sel.message.label == Axis::lambda);
    CHECK(sel.message.sign == +1);
    CHECK(sel.accepted.z == doctest::Approx(1.0));
}

TEST_CASE("alice skips rejected records and labels the accepted zone") {
    BlochState a{z_axis};
    // (x, y, z) frame: thresholds 0, 0, 1 -> u >= 1 rejects, u < 1 lands in nu.
    std::vector<LhvRecord> recs{
        make_record(x_axis, y_axis, z_axis, 1.5),
        make_record(x_axis, y_axis, z_axis, 1.2),
        make_record(x_axis, y_axis, z_axis, 0.5),
    };
    auto sel = alice_select_from(a, [&](std::uint64_t k) { return recs.at(k - 1); });
    CHECK(sel.message.k == 3);
    CHECK(sel.message.label == Axis::nu);
    CHECK(sel.message.sign == +1);
}

TEST_CASE("alice reports a negative sign when the overlap is negative") {
    BlochState a{z_axis};
    auto sel = alice_select_from(a, [&](std::uint64_t) {
        return make_record(z_axis.flipped(), x_axis, y_axis, 0.5);
    });
    CHECK(sel.message.sign == -1);
}

TEST_CASE("the acceptance scan aborts at the iteration cap") {
    BlochState a{z_axis};
    auto always_reject = [&](std::uint64_t) { return make_record(x_axis, y_axis, z_axis, 1.5); };
    CHECK_THROWS_AS(alice_select_from(a, always_reject, 1, 100), ProtocolError);
}

TEST_CASE("mean acceptance index is 2/sqrt3") {
    // k is geometric with success probability sqrt3/2 at each record.
    const std::uint64_t master = 515;
    const int n = 1'000'000;
    SplitMix64 vec_rng(derive_seed(master, 0, stream_tag::vectors));
    double k_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        BlochState a{sample_unit_vector(vec_rng)};
        auto sel = alice_select(a, shared_stream(session_seed(master, i)));
        k_sum += static_cast<double>(sel.message.k);
    }
    CHECK(std::abs(k_sum / n - 2.0 / sqrt3) < 0.002);
}

TEST_CASE("bob's projective rule on reconstructed vectors") {
    AliceMessage msg{1, Axis::lambda, +1};
    LhvRecord rec = make_record(z_axis, x_axis, y_axis, 0.5);
    CHECK(bob_vn_outcome(VnMeasurement{z_axis}, msg, rec) == +1);
    CHECK(bob_vn_outcome(VnMeasurement{z_axis.flipped()}, msg, rec) == -1);
    // sign bit -1 flips the reconstruction
    AliceMessage neg{1, Axis::lambda, -1};
    CHECK(bob_vn_outcome(VnMeasurement{z_axis}, neg, rec) == -1);
}

TEST_CASE("aligned state and measurement always give +1") {
    for (int i = 0; i < 10'000; ++i) {
        VnResult r = run_vn_session(BlochState{z_axis}, VnMeasurement{z_axis},
                                    session_seed(7, static_cast<std::uint64_t>(i)));
        REQUIRE(r.outcome == +1);
        REQUIRE(r.transcript.messages.size() == 1);
        REQUIRE(r.transcript.replies.empty());
        REQUIRE(r.transcript.iterations == 1);
    }
}

TEST_CASE("orthogonal measurement is a fair coin") {
    const int n = 1'000'000;
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        if (run_vn_session(BlochState{z_axis}, VnMeasurement{x_axis},
                           session_seed(11, static_cast<std::uint64_t>(i)))
                .outcome > 0) {
            ++plus;
        }
    }
    CHECK(std::abs(static_cast<double>(plus) / n - 0.5) < 0.002);
}

TEST_CASE("outcome frequency reproduces (1 + a.b)/2") {
    // a.b = 0.6 exactly
    BlochState a{z_axis};
    VnMeasurement b{UnitVec3{0.8, 0.0, 0.6}};
    const int n = 1'000'000;
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        if (run_vn_session(a, b, session_seed(13, static_cast<std::uint64_t>(i))).outcome > 0) {
            ++plus;
        }
    }
    CHECK(std::abs(static_cast<double>(plus) / n - 0.8) < 0.0016);
}

TEST_CASE("twenty random pairs stay within four binomial standard errors") {
    SplitMix64 rng(0xABCD);
    const int trials = 100'000;
    int within = 0;
    for (int pair = 0; pair < 20; ++pair) {
        BlochState a{sample_unit_vector(rng)};
        VnMeasurement b{sample_unit_vector(rng)};
        double target = 0.5 * (1.0 + dot(a.a, b.b));
        int plus = 0;
        for (int i = 0; i < trials; ++i) {
            std::uint64_t ss = session_seed(0x1000 + static_cast<std::uint64_t>(pair),
                                            static_cast<std::uint64_t>(i));
            if (run_vn_session(a, b, ss).outcome > 0) ++plus;
        }
        double se = std::sqrt(target * (1.0 - target) / trials);
        double dev = std::abs(static_cast<double>(plus) / trials - target);
        if (se == 0.0 ? dev == 0.0 : dev <= 4.0 * se) ++within;
    }
    CHECK(within >= 19);
}

TEST_CASE("singlet outcomes anticorrelate exactly for equal settings") {
    for (int i = 0; i < 10'000; ++i) {
        SingletResult r = run_singlet_session(BlochState{z_axis}, VnMeasurement{z_axis},
                                              session_seed(21, static_cast<std::uint64_t>(i)));
        REQUIRE(r.alpha * r.beta == -1);
    }
}

TEST_CASE("singlet marginal is unbiased") {
    const int n = 1'000'000;
    int alpha_plus = 0;
    SplitMix64 rng(31);
    BlochState a{sample_unit_vector(rng)};
    VnMeasurement b{sample_unit_vector(rng)};
    for (int i = 0; i < n; ++i) {
        if (run_singlet_session(a, b, session_seed(33, static_cast<std::uint64_t>(i))).alpha > 0) {
            ++alpha_plus;
        }
    }
    CHECK(std::abs(static_cast<double>(alpha_plus) / n - 0.5) < 0.002);
}

TEST_CASE("singlet correlator equals -a.b") {
    SplitMix64 rng(0xFEED);
    BlochState a{sample_unit_vector(rng)};
    VnMeasurement b{sample_unit_vector(rng)};
    double d = dot(a.a, b.b);
    // The oracle integral must itself land on -a.b.
    double oracle = singlet_correlator_oracle(d);
    CHECK(std::abs(oracle - (-d)) < 2e-3);
    const int n = 1'000'000;
    std::int64_t prod = 0;
    for (int i = 0; i < n; ++i) {
        SingletResult r = run_singlet_session(a, b, session_seed(35, static_cast<std::uint64_t>(i)));
        prod += r.alpha * r.beta;
    }
    CHECK(std::abs(static_cast<double>(prod) / n - (-d)) < 0.004);
}

TEST_CASE("teleportation equals singlet with a conditional flip") {
    SplitMix64 rng(0xBEEF);
    BlochState a{sample_unit_vector(rng)};
    VnMeasurement b{sample_unit_vector(rng)};
    for (int i = 0; i < 10'000; ++i) {
        std::uint64_t ss = session_seed(37, static_cast<std::uint64_t>(i));
        VnResult vn = run_vn_session(a, b, ss);
        SingletResult sg = run_singlet_session(a, b, ss);
        int flipped = sg.alpha > 0 ? -sg.beta : sg.beta;
        REQUIRE(vn.outcome == flipped);
    }
}

TEST_CASE("povm validation") {
    CHECK(!validate_povm(trine_povm()).has_value());
    Povm projective = Povm::from_vectors(std::array{Vec3{0, 0, 1}, Vec3{0, 0, -1}});
    CHECK(!validate_povm(projective).has_value());

    Povm bad_sum = Povm::from_vectors(std::array{Vec3{0, 0, 1}, Vec3{1, 0, 0}});
    auto err = validate_povm(bad_sum);
    REQUIRE(err.has_value());
    CHECK(err->find("vector sum nonzero") != std::string::npos);

    Povm too_few = Povm::from_vectors(std::array{Vec3{0, 0, 2}});
    auto err2 = validate_povm(too_few);
    REQUIRE(err2.has_value());
    CHECK(err2->find("fewer than 2") != std::string::npos);

    Povm bad_weight = Povm::from_vectors(std::array{Vec3{0, 0, 0.5}, Vec3{0, 0, -0.5}});
    auto err3 = validate_povm(bad_weight);
    REQUIRE(err3.has_value());
    CHECK(err3->find("weight sum") != std::string::npos);

    CHECK_THROWS_AS(run_povm_session(BlochState{z_axis}, bad_sum, 1), std::invalid_argument);
}

TEST_CASE("projective povm with aligned state is deterministic") {
    Povm projective = Povm::from_vectors(std::array{Vec3{0, 0, 1}, Vec3{0, 0, -1}});
    for (int i = 0; i < 10'000; ++i) {
        PovmResult r = run_povm_session(BlochState{z_axis}, projective,
                                        session_seed(41, static_cast<std::uint64_t>(i)));
        REQUIRE(r.element == 0);
        REQUIRE(r.transcript.replies.back() == 0);
        REQUIRE(r.transcript.replies.size() == r.transcript.iterations);
    }
}

TEST_CASE("trine statistics and iteration count") {
    Povm trine = trine_povm();
    BlochState a{x_axis};  // aligned with element 0: expect (2/3, 1/6, 1/6)
    const int n = 1'000'000;
    std::array<int, 3> counts{};
    std::uint64_t iter_sum = 0;
    for (int i = 0; i < n; ++i) {
        PovmResult r = run_povm_session(a, trine, session_seed(43, static_cast<std::uint64_t>(i)));
        ++counts[r.element];
        iter_sum += r.transcript.iterations;
        // replies are 1,1,...,0 by construction
        REQUIRE(r.transcript.replies.size() == r.transcript.iterations);
        REQUIRE(r.transcript.replies.back() == 0);
        for (std::size_t q = 0; q + 1 < r.transcript.replies.size(); ++q) {
            REQUIRE(r.transcript.replies[q] == 1);
        }
    }
    CHECK(std::abs(counts[0] / static_cast<double>(n) - 2.0 / 3.0) < 0.002);
    CHECK(std::abs(counts[1] / static_cast<double>(n) - 1.0 / 6.0) < 0.002);
    CHECK(std::abs(counts[2] / static_cast<double>(n) - 1.0 / 6.0) < 0.002);
    CHECK(std::abs(static_cast<double>(iter_sum) / n - 2.0) < 0.01);
}

TEST_CASE("expected povm frequencies sum to one for any valid povm") {
    SplitMix64 rng(0x9071);
    for (int trial = 0; trial < 50; ++trial) {
        // Antipodal-pair family: weights w and 1-w on two random directions.
        double w = 0.1 + 0.8 * rng.next_unit();
        UnitVec3 v1 = sample_unit_vector(rng);
        UnitVec3 v2 = sample_unit_vector(rng);
        std::array<Vec3, 4> vs{w * v1.vec(), -w * v1.vec(), (1.0 - w) * v2.vec(),
                               -(1.0 - w) * v2.vec()};
        Povm p = Povm::from_vectors(vs);
        REQUIRE(!validate_povm(p).has_value());
        UnitVec3 a = sample_unit_vector(rng);
        double sum = 0.0;
        for (const PovmElement& e : p.elements) sum += 0.5 * (e.weight + dot(a, e.bvec));
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("zone partition is exhaustive with ordered thresholds") {
    SplitMix64 rng(0x51C6);
    LhvStream stream(0x51C6);
    for (int i = 0; i < 1'000'000; ++i) {
        BlochState a{sample_unit_vector(rng)};
        LhvRecord rec = stream.next();
        double c1 = std::abs(dot(a.a, rec.triplet.lambda));
        double c2 = c1 + std::abs(dot(a.a, rec.triplet.mu));
        double c3 = c2 + std::abs(dot(a.a, rec.triplet.nu));
        REQUIRE(c1 <= c2);
        REQUIRE(c2 <= c3);
        REQUIRE(c3 >= 1.0 - 1e-12);
        REQUIRE(c3 <= sqrt3 + 1e-12);
        Zone z = zone_of(a, rec);
        Zone expected = rec.u < c1   ? Zone::a_lambda
                        : rec.u < c2 ? Zone::a_mu
                        : rec.u < c3 ? Zone::a_nu
                                     : Zone::reject;
        REQUIRE(z == expected);
    }
}

TEST_CASE("acceptance rate is sqrt3/2 and independent of the state") {
    const std::array<UnitVec3, 5> states{
        z_axis, x_axis, normalized(Vec3{1, 1, 1}), normalized(Vec3{-0.3, 0.7, 0.2}),
        normalized(Vec3{0.9, -0.1, -0.4})};
    std::array<double, 5> rates{};
    const int n = 1'000'000;
    for (std::size_t s = 0; s < states.size(); ++s) {
        LhvStream stream(0xACCE97 + s);
        int accepted = 0;
        for (int i = 0; i < n; ++i) {
            if (zone_of(BlochState{states[s]}, stream.next()) != Zone::reject) ++accepted;
        }
        rates[s] = static_cast<double>(accepted) / n;
        CHECK(std::abs(rates[s] - sqrt3 / 2.0) < 0.002);
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
        for (std::size_t j = i + 1; j < rates.size(); ++j) {
            CHECK(std::abs(rates[i] - rates[j]) < 0.004);
        }
    }
}

TEST_CASE("posterior of the flipped accepted vector has density 2t") {
    SplitMix64 rng(0x90957);
    BlochState a{sample_unit_vector(rng)};
    const int n = 1'000'000;
    std::vector<double> ts;
    ts.reserve(n);
    for (int i = 0; i < n; ++i) {
        auto sel = alice_select(a, shared_stream(session_seed(0x90957, static_cast<std::uint64_t>(i))));
        UnitVec3 flipped = sel.message.sign < 0 ? sel.accepted.flipped() : sel.accepted;
        ts.push_back(dot(a.a, flipped));
    }
    std::sort(ts.begin(), ts.end());
    double d = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        REQUIRE(ts[i] >= 0.0);
        double cdf = ts[i] * ts[i];  // CDF of density 2t on [0,1]
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(cdf - lo), std::abs(cdf - hi)));
    }
    CHECK(d < 0.002);
}

TEST_CASE("naive wire format round-trips and has documented layout") {
    // k=3 -> varint byte 0x03; label nu -> bits 10; sign -1 -> bit 1.
    BitWriter w;
    append_naive_message(w, AliceMessage{3, Axis::nu, -1});
    CHECK(w.bit_count() == 11);
    REQUIRE(w.bytes().size() == 2);
    CHECK(w.bytes()[0] == 0x03);
    CHECK(w.bytes()[1] == 0xA0);  // bits 101 then zero padding
    CHECK(naive_message_bits(AliceMessage{3, Axis::nu, -1}) == 11);
    CHECK(naive_message_bits(AliceMessage{200, Axis::mu, +1}) == 19);  // two varint bytes

    SplitMix64 rng(0x3117E);
    for (int i = 0; i < 200; ++i) {
        AliceMessage msg;
        msg.k = 1 + (rng.next_u64() % 100'000);
        msg.label = static_cast<Axis>(rng.next_u64() % 3);
        msg.sign = (rng.next_u64() & 1) ? +1 : -1;
        BitWriter writer;
        append_naive_message(writer, msg);
        CHECK(writer.bit_count() == naive_message_bits(msg));
        auto bytes = writer.bytes();
        BitReader reader(bytes.data(), writer.bit_count());
        AliceMessage back = read_naive_message(reader);
        REQUIRE(back.k == msg.k);
        REQUIRE(back.label == msg.label);
        REQUIRE(back.sign == msg.sign);
    }
}

}  // TEST_SUITE
