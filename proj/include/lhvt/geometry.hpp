#pragma once

#include <cmath>

#include "lhvt/rng.hpp"

namespace lhvt {

inline constexpr double sqrt3 = 1.7320508075688772935;
inline constexpr double unit_tolerance = 1e-9;

struct Vec3 {
    double x{}, y{}, z{};
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

// A point on the Bloch sphere. Fields are public like any vector type, but
// everything that hands these out (sampling, normalization, input parsing)
// guarantees |x^2+y^2+z^2 - 1| <= 1e-9.
struct UnitVec3 {
    double x{}, y{}, z{1.0};

    constexpr Vec3 vec() const { return {x, y, z}; }
    constexpr UnitVec3 flipped() const { return {-x, -y, -z}; }
};

constexpr double dot(UnitVec3 a, UnitVec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double dot(UnitVec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline constexpr UnitVec3 x_axis{1.0, 0.0, 0.0};
inline constexpr UnitVec3 y_axis{0.0, 1.0, 0.0};
inline constexpr UnitVec3 z_axis{0.0, 0.0, 1.0};

inline bool is_unit(UnitVec3 v, double tol = unit_tolerance) {
    return std::abs(dot(v, v) - 1.0) <= tol;
}

// Throws std::invalid_argument if the input is too short to normalize.
UnitVec3 normalized(Vec3 v);

// Names the three members of a shared triplet; also the message label.
enum class Axis { lambda, mu, nu };

// Right-handed orthonormal frame: pairwise dots and det-1 within 1e-9.
struct OrthoTriplet {
    UnitVec3 lambda, mu, nu;

    UnitVec3 axis(Axis which) const {
        switch (which) {
            case Axis::lambda: return lambda;
            case Axis::mu: return mu;
            default: return nu;
        }
    }
};

inline double triplet_det(const OrthoTriplet& t) {
    return dot(t.lambda, Vec3{t.mu.y * t.nu.z - t.mu.z * t.nu.y,
                              t.mu.z * t.nu.x - t.mu.x * t.nu.z,
                              t.mu.x * t.nu.y - t.mu.y * t.nu.x});
}

// Uniform point on the sphere: normalized 3D standard normal draw
// (zero-length draws are rejected and redrawn).
UnitVec3 sample_unit_vector(SplitMix64& rng);

// Haar-uniform frame: a uniformly random unit quaternion (uniform point on
// the 3-sphere) converted to a rotation and applied to the canonical basis.
OrthoTriplet sample_triplet(SplitMix64& rng);

}  // namespace lhvt
