#include "lhvt/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lhvt/version.hpp"

namespace lhvt {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = pi / 2.0;
constexpr double sqrt2 = 1.4142135623730950488;

// --- adaptive Simpson -------------------------------------------------------

template <class F>
double simpson_recurse(const F& f, double a, double fa, double m, double fm, double b,
                       double fb, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, fa, m, fm, b, fb, whole, tol, 52);
}

// Splits [a, b] at the given interior points (integrands here are continuous
// but have derivative kinks at geometrically determined places).
template <class F>
double integrate_pieces(const F& f, double a, double b, std::vector<double> pts, double tol) {
    pts.push_back(a);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-14; }),
              pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double lo = std::max(a, pts[i]);
        double hi = std::min(b, pts[i + 1]);
        if (hi <= lo) continue;
        total += integrate_adaptive(f, lo, hi, tol * (hi - lo) / (b - a));
    }
    return total;
}

// --- azimuthal arc measures --------------------------------------------------
//
// The absolute overlaps (|a.lambda|, |a.mu|, |a.nu|) of a fixed unit vector
// with a Haar-random frame are distributed like the absolute coordinates of
// a uniform point on the sphere. On the positive octant, parameterized by
// z = third coordinate and azimuth phi in [0, pi/2] with measure
// (2/pi) dz dphi, the zone conditions only involve
//     s1      = r cos(phi)             (r = sqrt(1 - z^2))
//     s1 + s2 = r (cos(phi) + sin(phi))
//     s1 + s2 + s3 = r (cos + sin) + z
// so for fixed z the phi-measure of each zone is an arc with closed-form
// endpoints, and only the z-integral is done numerically.

// measure{phi in [0,pi/2] : cos(phi) + sin(phi) > t}; handles +-inf.
double arc_g_above(double t) {
    if (t < 1.0) return half_pi;
    if (t >= sqrt2) return 0.0;
    return pi - 2.0 * std::asin(t / sqrt2);
}

// measure{phi : r cos(phi) <= u < r (cos(phi) + sin(phi))}
double arc_mu(double z, double u) {
    double r2 = (1.0 - z) * (1.0 + z);
    if (r2 <= 0.0) return 0.0;
    double t = u / std::sqrt(r2);
    if (t >= sqrt2) return 0.0;
    if (t <= 1.0) return std::asin(t);
    return pi - 2.0 * std::asin(t / sqrt2);
}

// measure{phi : u - z < r (cos(phi) + sin(phi)) <= u}
double arc_nu(double z, double u) {
    double r2 = (1.0 - z) * (1.0 + z);
    if (r2 <= 0.0) return u < z ? half_pi : 0.0;
    double r = std::sqrt(r2);
    return arc_g_above((u - z) / r) - arc_g_above(u / r);
}

// measure{phi : r (cos(phi) + sin(phi)) + z <= u}
double arc_reject(double z, double u) {
    double r2 = (1.0 - z) * (1.0 + z);
    if (r2 <= 0.0) return u >= z ? half_pi : 0.0;
    return half_pi - arc_g_above((u - z) / std::sqrt(r2));
}

// z locations where the arc formulas change branch, clipped to (0, 1).
std::vector<double> z_breakpoints(double u) {
    std::vector<double> pts;
    auto add = [&pts](double z) {
        if (z > 1e-14 && z < 1.0 - 1e-14) pts.push_back(z);
    };
    if (u <= 1.0) add(std::sqrt(1.0 - u * u));            // u / r = 1
    if (u <= sqrt2) add(std::sqrt(1.0 - 0.5 * u * u));    // u / r = sqrt(2)
    add(u);                                               // u - z = 0
    if (u <= sqrt2) {                                     // (u - z)/r = 1
        double d = std::sqrt(2.0 - u * u);
        add(0.5 * (u - d));
        add(0.5 * (u + d));
    }
    if (u <= sqrt3) {                                     // (u - z)/r = sqrt(2)
        double d = std::sqrt(std::max(0.0, 6.0 - 2.0 * u * u));
        add((u - d) / 3.0);
        add((u + d) / 3.0);
    }
    return pts;
}

double zone_prob_impl(Zone z, double u) {
    auto phi_arc = [z](double zz, double uu) {
        switch (z) {
            case Zone::a_lambda:
                // arc of cos(phi) > u / r
                {
                    double r2 = (1.0 - zz) * (1.0 + zz);
                    if (r2 <= 0.0) return 0.0;
                    double t = uu / std::sqrt(r2);
                    if (t >= 1.0) return 0.0;
                    return std::acos(std::max(t, 0.0));
                }
            case Zone::a_mu: return arc_mu(zz, uu);
            case Zone::a_nu: return arc_nu(zz, uu);
            default: return arc_reject(zz, uu);
        }
    };
    double val = integrate_pieces([&](double zz) { return phi_arc(zz, u); }, 0.0, 1.0,
                                  z_breakpoints(u), zone_quad_tol);
    return std::clamp(val * (2.0 / pi), 0.0, 1.0);
}

void require_u_range(double u) {
    if (!(u >= -1e-12) || !(u <= sqrt3 + 1e-12)) {
        throw std::domain_error("u outside [0, sqrt(3)]");
    }
}

}  // namespace

namespace detail {
double zone_prob_quadrature(Zone z, double u) {
    require_u_range(u);
    return zone_prob_impl(z, std::clamp(u, 0.0, sqrt3));
}
}  // namespace detail

double zone_prob_given_u(Zone z, double u) {
    require_u_range(u);
    u = std::clamp(u, 0.0, sqrt3);
    if (z == Zone::a_lambda) {
        // |a.lambda| is uniform on [0, 1], so this one is exact.
        return std::max(0.0, 1.0 - u);
    }
    return zone_prob_impl(z, u);
}

namespace {

double averaged(Zone z, bool entropy_weighted) {
    auto integrand = [z, entropy_weighted](double u) {
        double p = zone_prob_given_u(z, u);
        if (!entropy_weighted) return p;
        return p > 0.0 ? -p * std::log2(p) : 0.0;
    };
    double v = integrate_pieces(integrand, 0.0, sqrt3, {1.0, sqrt2}, 1e-8);
    return v / sqrt3;
}

}  // namespace

double zone_prob_avg(Zone z) {
    switch (z) {
        case Zone::a_lambda: return zone_prob_averages().a_lambda;
        case Zone::a_mu: return zone_prob_averages().a_mu;
        case Zone::a_nu: return zone_prob_averages().a_nu;
        default: return zone_prob_averages().r;
    }
}

const ZoneAverages& zone_prob_averages() {
    static const ZoneAverages avgs = [] {
        return ZoneAverages{averaged(Zone::a_lambda, false), averaged(Zone::a_mu, false),
                            averaged(Zone::a_nu, false), averaged(Zone::reject, false)};
    }();
    return avgs;
}

const QValues& q_values() {
    static const QValues qs = [] {
        return QValues{averaged(Zone::a_lambda, true), averaged(Zone::a_mu, true),
                       averaged(Zone::a_nu, true), averaged(Zone::reject, true)};
    }();
    return qs;
}

const EntropyReport& entropy_report() {
    static const EntropyReport rep = [] {
        const ZoneAverages& p = zone_prob_averages();
        const QValues& q = q_values();
        EntropyReport r;
        r.q_a_lambda = q.a_lambda;
        r.q_a_mu = q.a_mu;
        r.q_a_nu = q.a_nu;
        r.q_r = q.r;
        r.p_a = p.a_lambda + p.a_mu + p.a_nu;
        r.p_r = 1.0 - r.p_a;  // by definition; the quadrature average of the
                              // reject zone is checked against it in tests
        r.h = (q.a_lambda + q.a_mu + q.a_nu + q.r) / r.p_a;
        r.total_vn = r.h + 1.0;
        r.singlet_bits = r.h;
        r.total_povm = 2.0 * (r.total_vn + 1.0);
        r.quadrature_tol = 1e-8;
        r.generator = generator_name;
        return r;
    }();
    return rep;
}

nlohmann::ordered_json EntropyReport::to_json() const {
    nlohmann::ordered_json j;
    j["p_A"] = p_a;
    j["p_R"] = p_r;
    j["q_A_lambda"] = q_a_lambda;
    j["q_A_mu"] = q_a_mu;
    j["q_A_nu"] = q_a_nu;
    j["q_R"] = q_r;
    j["H"] = h;
    j["total_vn"] = total_vn;
    j["singlet_bits"] = singlet_bits;
    j["total_povm"] = total_povm;
    j["quadrature_tol"] = quadrature_tol;
    j["generator"] = generator;
    return j;
}

// --- sampled table -----------------------------------------------------------

ZoneProbTable::ZoneProbTable() {
    const std::array<std::pair<double, double>, 3> bounds{
        {{0.0, 1.0}, {1.0, sqrt2}, {sqrt2, sqrt3}}};
    const std::array<std::size_t, 3> intervals{1024, 512, 512};
    for (std::size_t s = 0; s < 3; ++s) {
        Segment& seg = segments_[s];
        seg.lo = bounds[s].first;
        seg.hi = bounds[s].second;
        std::size_t n = intervals[s];
        seg.step = (seg.hi - seg.lo) / static_cast<double>(n);
        for (auto& v : seg.values) v.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            double u = (i == n) ? seg.hi : seg.lo + seg.step * static_cast<double>(i);
            seg.values[0][i] = zone_prob_given_u(Zone::a_lambda, u);
            seg.values[1][i] = zone_prob_given_u(Zone::a_mu, u);
            seg.values[2][i] = zone_prob_given_u(Zone::a_nu, u);
            seg.values[3][i] = zone_prob_given_u(Zone::reject, u);
        }
    }
}

const ZoneProbTable& ZoneProbTable::shared() {
    static const ZoneProbTable table;
    return table;
}

std::size_t ZoneProbTable::node_count() const {
    std::size_t n = 0;
    for (const Segment& s : segments_) n += s.values[0].size();
    return n;
}

double ZoneProbTable::prob(Zone z, double u) const {
    require_u_range(u);
    u = std::clamp(u, 0.0, sqrt3);
    const Segment& seg = u < segments_[0].hi ? segments_[0]
                         : u < segments_[1].hi ? segments_[1]
                                               : segments_[2];
    const std::vector<double>& y = seg.values[static_cast<std::size_t>(z)];
    std::size_t n = y.size() - 1;
    double pos = (u - seg.lo) / seg.step;
    auto i = static_cast<std::size_t>(std::min(pos, static_cast<double>(n - 1)));
    double x = pos - static_cast<double>(i);
    // Catmull-Rom with quadratically extrapolated ghost nodes at the edges.
    double y0 = i > 0 ? y[i - 1] : 3.0 * y[0] - 3.0 * y[1] + y[2];
    double y1 = y[i];
    double y2 = y[i + 1];
    double y3 = i + 2 <= n ? y[i + 2] : 3.0 * y[n] - 3.0 * y[n - 1] + y[n - 2];
    double v = y1 + 0.5 * x * (y2 - y0 +
                               x * (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3 +
                                    x * (3.0 * (y1 - y2) + y3 - y0)));
    return std::clamp(v, 0.0, 1.0);
}

std::array<double, 4> ZoneProbTable::pmf(double u) const {
    return {prob(Zone::a_lambda, u), prob(Zone::a_mu, u), prob(Zone::a_nu, u),
            prob(Zone::reject, u)};
}

// --- codelengths --------------------------------------------------------------

double codelength_prob(Zone z, double u) {
    double p = ZoneProbTable::shared().prob(z, u);
    if (p < 1e-9) {
        p = zone_prob_given_u(z, u);  // resolve near-boundary values exactly
        if (p <= 0.0) {
            throw ProtocolError("impossible zone for record value u");
        }
    }
    return p;
}

double ideal_codelength(const SessionTranscript& t, const LhvStream& stream) {
    return ideal_codelength_from_u(t, [&stream](std::uint64_t k) { return stream.record(k).u; });
}

FidelityBudget fidelity_budget(double avg_bits) {
    if (!(avg_bits >= 0.0)) {
        throw std::domain_error("bit budget must be non-negative");
    }
    double total = entropy_report().total_vn;
    if (avg_bits > total) {
        return {1.0, true};
    }
    return {(avg_bits + (total - avg_bits) * 0.5) / total, false};
}

}  // namespace lhvt
