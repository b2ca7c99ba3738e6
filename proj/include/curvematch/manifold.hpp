#pragma once

#include <array>
#include <cmath>
#include <string>

#include "curvematch/errors.hpp"

namespace curvematch {

enum class ManifoldId {
    Plane,                // R^2 with the Euclidean metric
    HyperbolicHalfPlane,  // {(x,y) : y > 0} with ds^2 = (dx^2 + dy^2)/y^2
    Sphere,               // unit vectors in R^3 with the induced metric
};

inline int ambient_dim(ManifoldId m) { return m == ManifoldId::Sphere ? 3 : 2; }

inline std::string manifold_name(ManifoldId m) {
    switch (m) {
        case ManifoldId::Plane: return "plane";
        case ManifoldId::HyperbolicHalfPlane: return "h2";
        case ManifoldId::Sphere: return "s2";
    }
    return "?";
}

// Small fixed vector; 2D manifolds keep z = 0.
struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_ = 0) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0 ? v * (1.0 / n) : v;
}

struct ManifoldPoint {
    ManifoldId manifold = ManifoldId::Plane;
    Vec3 coords;
};

struct TangentVector {
    ManifoldPoint base;
    Vec3 components;
};

namespace detail {

constexpr double kSpherePointTol = 1e-9;   // |p| = 1 tolerance
constexpr double kAntipodeTol = 1e-6;      // reject <p,q> < -1 + tol
constexpr double kTinyStep = 1e-14;

inline void check_on_manifold(ManifoldId m, const Vec3& p) {
    switch (m) {
        case ManifoldId::Plane:
            break;
        case ManifoldId::HyperbolicHalfPlane:
            if (!(p.y > 0))
                throw ContractViolation("half-plane point requires y > 0, got y = " + std::to_string(p.y));
            break;
        case ManifoldId::Sphere:
            if (std::abs(norm(p) - 1.0) > kSpherePointTol)
                throw ContractViolation("sphere point must be a unit vector, |p| = " + std::to_string(norm(p)));
            break;
    }
}

// Riemannian inner product of raw components anchored at p.
inline double metric_dot(ManifoldId m, const Vec3& p, const Vec3& u, const Vec3& v) {
    switch (m) {
        case ManifoldId::Plane: return u.x * v.x + u.y * v.y;
        case ManifoldId::HyperbolicHalfPlane: return (u.x * v.x + u.y * v.y) / (p.y * p.y);
        case ManifoldId::Sphere: return dot(u, v);
    }
    return 0;
}

inline double metric_norm(ManifoldId m, const Vec3& p, const Vec3& u) {
    return std::sqrt(metric_dot(m, p, u, u));
}

// Orthogonal projection of an ambient difference vector onto T_p M.
inline Vec3 project_tangent(ManifoldId m, const Vec3& p, const Vec3& u) {
    if (m == ManifoldId::Sphere) return u - p * dot(p, u);
    return u;
}

// --- sphere ------------------------------------------------------------

inline Vec3 sphere_exp(const Vec3& p, const Vec3& v) {
    double th = norm(v);
    if (th < kTinyStep) return p;
    Vec3 q = p * std::cos(th) + v * (std::sin(th) / th);
    return normalized(q);
}

inline Vec3 sphere_log(const Vec3& p, const Vec3& q) {
    double c = dot(p, q);
    if (c < -1.0 + kAntipodeTol)
        throw SingularityError("log map undefined near antipodal sphere points");
    Vec3 perp = q - p * c;
    double s = norm(perp);
    if (s < 1e-15) return {0, 0, 0};
    double th = std::atan2(s, c);
    return perp * (th / s);
}

// --- hyperbolic half-plane ----------------------------------------------
//
// Geodesics are vertical lines and semicircles centered on the x-axis.
// The circle branch is written so that no large intermediate (center
// coordinate) is ever subtracted from a small one: offsets g = x - x0 are
// formed directly, and the endpoint uses cos(th1) - cos(thp) in product form.

constexpr double kVerticalDirTol = 1e-9;  // |ux| below this: treat geodesic as vertical

inline double h2_distance(const Vec3& p, const Vec3& q) {
    double dx = q.x - p.x, dy = q.y - p.y;
    double r = std::sqrt(dx * dx + dy * dy) / (2.0 * std::sqrt(p.y * q.y));
    return 2.0 * std::asinh(r);
}

inline Vec3 h2_exp(const Vec3& p, const Vec3& v) {
    double en = std::sqrt(v.x * v.x + v.y * v.y);  // Euclidean length
    double r = en / p.y;                           // hyperbolic length
    if (r < kTinyStep) return p;
    double ux = v.x / en, uy = v.y / en;
    if (std::abs(ux) <= kVerticalDirTol) {
        double sgn = uy >= 0 ? 1.0 : -1.0;
        return {p.x, p.y * std::exp(sgn * r), 0};
    }
    double g = -p.y * uy / ux;  // x - x0 of the circle center
    double R = std::hypot(p.y, g);
    double thp = std::atan2(p.y, g);
    double up = std::log(std::tan(0.5 * thp));
    double sgn = ux > 0 ? -1.0 : 1.0;  // +x motion decreases the angle
    double u1 = up + sgn * r;
    double th1 = 2.0 * std::atan(std::exp(u1));
    double xnew = p.x - 2.0 * R * std::sin(0.5 * (th1 + thp)) * std::sin(0.5 * (th1 - thp));
    double ynew = R * std::sin(th1);
    return {xnew, ynew, 0};
}

constexpr double kVerticalChordTol = 1e-12;  // relative |dx| below this: vertical geodesic

inline Vec3 h2_log(const Vec3& p, const Vec3& q) {
    double dx = q.x - p.x;
    double scale = std::abs(p.x) + std::abs(q.x) + p.y + q.y;
    if (std::abs(dx) <= kVerticalChordTol * scale) {
        return {0, p.y * std::log(q.y / p.y), 0};
    }
    double d = h2_distance(p, q);
    // center offsets, formed without cancellation: g = x - x0
    double w = (q.y * q.y - p.y * p.y) / (2.0 * dx);
    double g1 = -0.5 * dx - w;
    double g2 = 0.5 * dx - w;
    double thp = std::atan2(p.y, g1);
    double thq = std::atan2(q.y, g2);
    double sgn = thq > thp ? 1.0 : -1.0;
    double R = std::hypot(p.y, g1);
    // Euclidean unit tangent at p in the +angle direction is (-y1, g1)/R.
    double f = sgn * d * p.y / R;
    return {-p.y * f, g1 * f, 0};
}

}  // namespace detail

inline void check_point(const ManifoldPoint& p) { detail::check_on_manifold(p.manifold, p.coords); }

inline void check_tangent(const TangentVector& t) {
    check_point(t.base);
    if (t.base.manifold == ManifoldId::Sphere &&
        std::abs(dot(t.base.coords, t.components)) > detail::kSpherePointTol)
        throw ContractViolation("sphere tangent vector must be orthogonal to its base point");
}

namespace detail {

inline void check_same_base(const ManifoldPoint& p, const TangentVector& u) {
    if (u.base.manifold != p.manifold || norm(u.base.coords - p.coords) > 1e-9)
        throw ContractViolation("tangent vector is anchored at a different point");
}

}  // namespace detail

/// Riemannian metric at p applied to two tangent vectors based there.
inline double inner(const ManifoldPoint& p, const TangentVector& u, const TangentVector& v) {
    detail::check_same_base(p, u);
    detail::check_same_base(p, v);
    return detail::metric_dot(p.manifold, p.coords, u.components, v.components);
}

inline double tangent_norm(const TangentVector& u) {
    return detail::metric_norm(u.base.manifold, u.base.coords, u.components);
}

/// Endpoint at time 1 of the geodesic leaving p with velocity v.
inline ManifoldPoint exp(const ManifoldPoint& p, const TangentVector& v) {
    detail::check_same_base(p, v);
    switch (p.manifold) {
        case ManifoldId::Plane:
            return {p.manifold, p.coords + v.components};
        case ManifoldId::HyperbolicHalfPlane:
            return {p.manifold, detail::h2_exp(p.coords, v.components)};
        case ManifoldId::Sphere:
            return {p.manifold, detail::sphere_exp(p.coords, v.components)};
    }
    return p;
}

/// Initial velocity of the minimal geodesic from p to q; |log(p,q)| = d(p,q).
inline TangentVector log(const ManifoldPoint& p, const ManifoldPoint& q) {
    if (p.manifold != q.manifold) throw ContractViolation("log: points on different manifolds");
    switch (p.manifold) {
        case ManifoldId::Plane:
            return {p, q.coords - p.coords};
        case ManifoldId::HyperbolicHalfPlane:
            return {p, detail::h2_log(p.coords, q.coords)};
        case ManifoldId::Sphere:
            return {p, detail::sphere_log(p.coords, q.coords)};
    }
    return {p, {}};
}

/// Geodesic distance between two points.
inline double distance(const ManifoldPoint& p, const ManifoldPoint& q) {
    if (p.manifold != q.manifold) throw ContractViolation("distance: points on different manifolds");
    switch (p.manifold) {
        case ManifoldId::Plane:
            return norm(q.coords - p.coords);
        case ManifoldId::HyperbolicHalfPlane:
            return detail::h2_distance(p.coords, q.coords);
        case ManifoldId::Sphere: {
            double c = dot(p.coords, q.coords);
            return std::atan2(norm(cross(p.coords, q.coords)), c);
        }
    }
    return 0;
}

namespace detail {

// Parallel transport along the minimal geodesic p -> q, frame construction:
// the geodesic tangent maps to the geodesic tangent, the complementary
// direction is carried isometrically. Exact for these constant-curvature
// backends.
inline Vec3 transport_components(ManifoldId m, const Vec3& p, const Vec3& q, const Vec3& v) {
    switch (m) {
        case ManifoldId::Plane:
            return v;
        case ManifoldId::HyperbolicHalfPlane: {
            Vec3 u = h2_log(p, q);
            double d = metric_norm(m, p, u);
            if (d < 1e-12) return v;
            Vec3 e1 = u * (1.0 / d);
            Vec3 e2{-e1.y, e1.x, 0};  // conformal 90-degree rotation stays orthonormal
            double a = metric_dot(m, p, v, e1);
            double b = metric_dot(m, p, v, e2);
            Vec3 w = h2_log(q, p);
            Vec3 f1 = w * (-1.0 / d);
            Vec3 f2{-f1.y, f1.x, 0};
            return f1 * a + f2 * b;
        }
        case ManifoldId::Sphere: {
            Vec3 u = sphere_log(p, q);
            double d = norm(u);
            if (d < 1e-12) return v - q * dot(q, v);
            Vec3 e1 = u * (1.0 / d);
            Vec3 bn = normalized(cross(p, e1));  // binormal, parallel along the great circle
            double a = dot(v, e1);
            double b = dot(v, bn);
            Vec3 f1 = sphere_log(q, p) * (-1.0 / d);
            Vec3 w = f1 * a + bn * b;
            return w - q * dot(q, w);
        }
    }
    return v;
}

}  // namespace detail

/// Parallel transport of v along the minimal geodesic from p to q.
inline TangentVector transport(const ManifoldPoint& p, const ManifoldPoint& q, const TangentVector& v) {
    detail::check_same_base(p, v);
    if (p.manifold != q.manifold) throw ContractViolation("transport: points on different manifolds");
    return {q, detail::transport_components(p.manifold, p.coords, q.coords, v.components)};
}

}  // namespace curvematch
