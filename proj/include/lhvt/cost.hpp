#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lhvt/lhv.hpp"
#include "lhvt/protocol.hpp"

namespace lhvt {

// Absolute tolerance of the deterministic quadratures below. The u-averaged
// quantities use the same budget for the outer integral.
inline constexpr double zone_quad_tol = 1e-9;

// P(zone | u): the state-independent probability that a Haar-random frame
// puts the scalar u into the given zone. The lambda zone has the closed form
// max(0, 1 - u); the others are evaluated by deterministic quadrature to
// better than 1e-6 absolute. Throws std::domain_error outside [0, sqrt(3)].
double zone_prob_given_u(Zone z, double u);

// (1/sqrt3) * integral of p_z(u) du over [0, sqrt3], by the same quadrature.
double zone_prob_avg(Zone z);

struct ZoneAverages {
    double a_lambda, a_mu, a_nu, r;
};
const ZoneAverages& zone_prob_averages();

// q_z = -(1/sqrt3) * integral of p_z(u) log2 p_z(u) du, with p log p := 0 at
// p = 0.
struct QValues {
    double a_lambda, a_mu, a_nu, r;
};
const QValues& q_values();

struct EntropyReport {
    double p_a{}, p_r{};
    double q_a_lambda{}, q_a_mu{}, q_a_nu{}, q_r{};
    double h{};            // (q_a + q_r) / p_a, bits per session
    double total_vn{};     // h + 1 sign bit
    double singlet_bits{}; // h: no sign bit in the singlet variant
    double total_povm{};   // 2 * (total_vn + 1 reply bit)
    double quadrature_tol{};
    std::string generator;

    nlohmann::ordered_json to_json() const;
};

// Computed once; subsequent calls return the cached report.
const EntropyReport& entropy_report();

// Dense sampled form of the four p_z(u) curves for hot paths (codelengths,
// coder models). Built once per process; piecewise-cubic between samples,
// segmented at the structural points u = 1 and u = sqrt(2) so interpolation
// never crosses a kink. Absolute error vs the direct quadrature <= 1e-7.
class ZoneProbTable {
public:
    static const ZoneProbTable& shared();

    double prob(Zone z, double u) const;
    // Order: a_lambda, a_mu, a_nu, reject. Clamped to [0, 1].
    std::array<double, 4> pmf(double u) const;

    double tolerance() const { return 1e-7; }
    std::size_t node_count() const;

private:
    ZoneProbTable();
    struct Segment {
        double lo, hi, step;
        std::array<std::vector<double>, 4> values;
    };
    std::array<Segment, 3> segments_;
};

// Table probability with a direct-quadrature fallback near the zero
// boundary; throws if the zone is impossible at that u.
double codelength_prob(Zone z, double u);

// Ideal code cost of a transcript's messages given the receiver's side
// information (the shared u stream): -log2 of the product of per-record zone
// probabilities. Excludes sign and reply bits. Multi-message transcripts
// (two-way loop) sum per-iteration costs with the scan resuming after each
// accepted index.
template <class UFn>
double ideal_codelength_from_u(const SessionTranscript& t, UFn&& u_at) {
    double bits = 0.0;
    std::uint64_t scan = 1;
    for (const AliceMessage& msg : t.messages) {
        for (std::uint64_t i = scan; i < msg.k; ++i) {
            bits -= std::log2(codelength_prob(Zone::reject, u_at(i)));
        }
        bits -= std::log2(codelength_prob(axis_zone(msg.label), u_at(msg.k)));
        scan = msg.k + 1;
    }
    return bits;
}

double ideal_codelength(const SessionTranscript& t, const LhvStream& stream);

// Time-share of the full protocol (fidelity 1 at total_vn bits) with the
// shared-randomness-only baseline (fidelity 1/2 at zero bits).
struct FidelityBudget {
    double value;
    bool clamped;  // budget exceeded total_vn and was clamped to fidelity 1
};
FidelityBudget fidelity_budget(double avg_bits);

namespace detail {
// Quadrature route for every zone, including a_lambda (which the public
// function answers in closed form); used to cross-check the reduction.
double zone_prob_quadrature(Zone z, double u);
}  // namespace detail

}  // namespace lhvt
