#include "lhvt/geometry.hpp"

#include <numbers>
#include <stdexcept>

namespace lhvt {

UnitVec3 normalized(Vec3 v) {
    double n = norm(v);
    if (!(n > 1e-12) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize near-zero or non-finite vector");
    }
    return {v.x / n, v.y / n, v.z / n};
}

UnitVec3 sample_unit_vector(SplitMix64& rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (;;) {
        // Box-Muller, trig form; the fourth normal is discarded.
        double u1 = rng.next_unit();
        double u2 = rng.next_unit();
        double u3 = rng.next_unit();
        double u4 = rng.next_unit();
        double r1 = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u) avoids log(0)
        double r2 = std::sqrt(-2.0 * std::log1p(-u3));
        Vec3 g{r1 * std::cos(two_pi * u2), r1 * std::sin(two_pi * u2),
               r2 * std::cos(two_pi * u4)};
        double n = norm(g);
        if (n > 1e-12) {
            return {g.x / n, g.y / n, g.z / n};
        }
    }
}

OrthoTriplet sample_triplet(SplitMix64& rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    // Shoemake subgroup method: three uniforms -> uniform unit quaternion.
    double s = rng.next_unit();
    double b = two_pi * rng.next_unit();
    double c = two_pi * rng.next_unit();
    double r0 = std::sqrt(1.0 - s);
    double r1 = std::sqrt(s);
    double w = r0 * std::sin(b);
    double x = r0 * std::cos(b);
    double y = r1 * std::sin(c);
    double z = r1 * std::cos(c);

    // Rotation-matrix columns, i.e. images of x,y,z under the rotation.
    UnitVec3 lambda{1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y + w * z), 2.0 * (x * z - w * y)};
    UnitVec3 mu{2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z + w * x)};
    UnitVec3 nu{2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)};
    return {lambda, mu, nu};
}

}  // namespace lhvt
