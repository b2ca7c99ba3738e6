#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "curvematch/manifold.hpp"

namespace curvematch {

namespace detail {

// Second-order finite differences on a uniform grid: centered in the
// interior, 3-point one-sided at both ends. T needs +,-,*(double).
template <typename T>
std::vector<T> fd_derivative(const std::vector<T>& f, double dt) {
    const std::size_t n = f.size();
    std::vector<T> out(n);
    const double inv2 = 1.0 / (2.0 * dt);
    out[0] = (f[1] * 4.0 - f[2] - f[0] * 3.0) * inv2;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (f[i + 1] - f[i - 1]) * inv2;
    out[n - 1] = (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * inv2;
    return out;
}

inline double trapezoid(const std::vector<double>& f, double dt) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dt;
}

}  // namespace detail

/// An immersion c : [0,1] -> M sampled at t_i = i/N.
class DiscreteCurve {
public:
    DiscreteCurve(ManifoldId m, std::vector<Vec3> pts) : manifold_(m), pts_(std::move(pts)) {
        if (pts_.size() < 3)
            throw ContractViolation("a discrete curve needs at least 3 samples");
        for (const auto& p : pts_) detail::check_on_manifold(m, p);
        check_immersed();
    }

    ManifoldId manifold() const { return manifold_; }
    std::size_t segments() const { return pts_.size() - 1; }   // N
    std::size_t samples() const { return pts_.size(); }        // N + 1
    double grid_step() const { return 1.0 / static_cast<double>(segments()); }

    const Vec3& operator[](std::size_t i) const { return pts_[i]; }
    const std::vector<Vec3>& points() const { return pts_; }
    ManifoldPoint point(std::size_t i) const { return {manifold_, pts_[i]}; }

private:
    void check_immersed() const;

    ManifoldId manifold_;
    std::vector<Vec3> pts_;
};

/// Tangent components along a curve; entry i is anchored at curve point i.
struct VectorField {
    std::vector<Vec3> comps;

    std::size_t size() const { return comps.size(); }
    Vec3& operator[](std::size_t i) { return comps[i]; }
    const Vec3& operator[](std::size_t i) const { return comps[i]; }

    VectorField& operator+=(const VectorField& o) {
        for (std::size_t i = 0; i < comps.size(); ++i) comps[i] += o.comps[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (std::size_t i = 0; i < comps.size(); ++i) comps[i] -= o.comps[i];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (auto& c : comps) c *= s;
        return *this;
    }
};

inline void check_field(const DiscreteCurve& c, const VectorField& w) {
    if (w.size() != c.samples())
        throw ContractViolation("vector field arity does not match the curve grid");
    if (c.manifold() == ManifoldId::Sphere) {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (std::abs(dot(c[i], w[i])) > detail::kSpherePointTol * (1.0 + norm(w[i])))
                throw ContractViolation("field vector is not tangent to the sphere at its node");
    }
}

namespace detail {

// Raw coordinate finite differences projected onto the tangent space.
inline std::vector<Vec3> velocity_components(ManifoldId m, const std::vector<Vec3>& pts) {
    auto raw = fd_derivative(pts, 1.0 / static_cast<double>(pts.size() - 1));
    if (m == ManifoldId::Sphere)
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = project_tangent(m, pts[i], raw[i]);
    return raw;
}

inline std::vector<double> speed_values(ManifoldId m, const std::vector<Vec3>& pts,
                                        const std::vector<Vec3>& vel) {
    std::vector<double> s(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) s[i] = metric_norm(m, pts[i], vel[i]);
    return s;
}

}  // namespace detail

// Minimal immersion check: consecutive samples distinct and centered
// velocities nonzero (a fold-back has healthy chords but zero centered
// speed). velocity() applies the stricter curve-length-relative threshold.
inline void DiscreteCurve::check_immersed() const {
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
        if (!(norm(pts_[i + 1] - pts_[i]) > 0))
            throw DegenerateCurveError("curve is not immersed: repeated sample at node " +
                                       std::to_string(i));
    for (std::size_t i = 1; i + 1 < pts_.size(); ++i) {
        Vec3 centered = detail::project_tangent(manifold_, pts_[i],
                                                (pts_[i + 1] - pts_[i - 1]) * 0.5);
        if (!(detail::metric_norm(manifold_, pts_[i], centered) > 0))
            throw DegenerateCurveError("curve is not immersed: zero discrete speed at node " +
                                       std::to_string(i));
    }
}

/// Finite-difference velocity field c_t, tangent at every node.
inline VectorField velocity(const DiscreteCurve& c) {
    auto vel = detail::velocity_components(c.manifold(), c.points());
    auto sp = detail::speed_values(c.manifold(), c.points(), vel);
    double len = detail::trapezoid(sp, c.grid_step());
    for (std::size_t i = 0; i < sp.size(); ++i)
        if (sp[i] <= 1e-10 * len)
            throw DegenerateCurveError("degenerate curve: speed at node " + std::to_string(i) +
                                       " vanishes relative to curve length");
    return {std::move(vel)};
}

/// Transport-based covariant derivative of a field along a curve.
/// Centered differences at interior nodes, 3-point one-sided at the ends.
inline VectorField covariant_derivative(const DiscreteCurve& c, const VectorField& w) {
    if (c.samples() < 3) throw ContractViolation("covariant derivative needs at least 3 nodes");
    if (w.size() != c.samples())
        throw ContractViolation("vector field arity does not match the curve grid");
    const ManifoldId m = c.manifold();
    const std::size_t n = c.samples();
    const double inv2 = 1.0 / (2.0 * c.grid_step());
    VectorField out;
    out.comps.resize(n);
    auto T = [&](std::size_t from, std::size_t to, const Vec3& v) {
        return detail::transport_components(m, c[from], c[to], v);
    };
    out[0] = (T(1, 0, w[1]) * 4.0 - T(2, 0, w[2]) - w[0] * 3.0) * inv2;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out[i] = (T(i + 1, i, w[i + 1]) - T(i - 1, i, w[i - 1])) * inv2;
    out[n - 1] = (w[n - 1] * 3.0 - T(n - 2, n - 1, w[n - 2]) * 4.0 + T(n - 3, n - 1, w[n - 3])) * inv2;
    return out;
}

/// Riemannian arc length by trapezoidal quadrature of |c_t|.
inline double arc_length(const DiscreteCurve& c) {
    auto vel = detail::velocity_components(c.manifold(), c.points());
    auto sp = detail::speed_values(c.manifold(), c.points(), vel);
    return detail::trapezoid(sp, c.grid_step());
}

/// A discretized increasing diffeomorphism of [0,1].
class Diffeo {
public:
    static constexpr double kMinIncrement = 1e-12;

    explicit Diffeo(std::vector<double> values) : v_(std::move(values)) { validate(); }

    static Diffeo identity(std::size_t segments) {
        std::vector<double> v(segments + 1);
        for (std::size_t i = 0; i <= segments; ++i)
            v[i] = static_cast<double>(i) / static_cast<double>(segments);
        v.back() = 1.0;
        return Diffeo(std::move(v));
    }

    std::size_t segments() const { return v_.size() - 1; }
    const std::vector<double>& values() const { return v_; }
    double operator[](std::size_t i) const { return v_[i]; }

    /// Piecewise-linear evaluation at u in [0,1].
    double evaluate(double u) const {
        const std::size_t n = segments();
        double s = u * static_cast<double>(n);
        if (s <= 0) return v_.front();
        if (s >= static_cast<double>(n)) return v_.back();
        std::size_t j = static_cast<std::size_t>(s);
        double f = s - static_cast<double>(j);
        return v_[j] + f * (v_[j + 1] - v_[j]);
    }

private:
    void validate() const {
        if (v_.size() < 2) throw ContractViolation("diffeo needs at least 2 samples");
        if (v_.front() != 0.0 || v_.back() != 1.0)
            throw ContractViolation("diffeo must fix the endpoints 0 and 1");
        for (std::size_t i = 0; i + 1 < v_.size(); ++i)
            if (!(v_[i + 1] - v_[i] > kMinIncrement))
                throw ContractViolation("diffeo increments must stay above " +
                                        std::to_string(kMinIncrement));
    }

    std::vector<double> v_;
};

/// Monotone piecewise-linear inverse sampled on the uniform grid.
inline Diffeo inverse(const Diffeo& phi) {
    const std::size_t n = phi.segments();
    std::vector<double> out(n + 1);
    out[0] = 0.0;
    out[n] = 1.0;
    std::size_t j = 0;
    for (std::size_t i = 1; i < n; ++i) {
        double target = static_cast<double>(i) / static_cast<double>(n);
        while (phi[j + 1] < target) ++j;
        double f = (target - phi[j]) / (phi[j + 1] - phi[j]);
        out[i] = (static_cast<double>(j) + f) / static_cast<double>(n);
    }
    return Diffeo(std::move(out));
}

/// Composition phi(psi(t_i)), sampled on psi's grid.
inline Diffeo compose(const Diffeo& phi, const Diffeo& psi) {
    std::vector<double> out(psi.segments() + 1);
    for (std::size_t i = 0; i <= psi.segments(); ++i) out[i] = phi.evaluate(psi[i]);
    out.front() = 0.0;
    out.back() = 1.0;
    return Diffeo(std::move(out));
}

namespace detail {

// Clip non-positive grid increments and renormalize to phi(1) = 1.
// Returns the number of clipped increments. The clip floor sits above the
// Diffeo minimum so the renormalized values still validate.
inline std::size_t repair_monotone(std::vector<double>& v) {
    constexpr double kClip = 1e-11;
    const std::size_t n = v.size() - 1;
    std::size_t clipped = 0;
    std::vector<double> inc(n);
    for (std::size_t i = 0; i < n; ++i) {
        inc[i] = v[i + 1] - v[i];
        if (inc[i] < kClip) {
            inc[i] = kClip;
            ++clipped;
        }
    }
    if (clipped == 0 && std::abs(v.back() - 1.0) < 1e-15) {
        v.back() = 1.0;
        return 0;
    }
    double total = 0;
    for (double d : inc) total += d;
    v[0] = 0.0;
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += inc[i] / total;
        v[i + 1] = acc;
    }
    v[n] = 1.0;
    return clipped;
}

// Geodesic interpolation of a curve at parameter u in [0,1]. Parameters
// within 1e-9 grid units of a node snap to it, so identity diffeos
// reproduce the sample points exactly.
inline Vec3 sample_curve(const DiscreteCurve& c, double u) {
    const std::size_t n = c.segments();
    double s = u * static_cast<double>(n);
    double r = std::round(s);
    if (std::abs(s - r) < 1e-9 && r >= 0 && r <= static_cast<double>(n))
        return c[static_cast<std::size_t>(r)];
    if (s <= 0) return c[0];
    if (s >= static_cast<double>(n)) return c[n];
    std::size_t j = static_cast<std::size_t>(s);
    double f = s - static_cast<double>(j);
    if (f == 0.0) return c[j];
    ManifoldPoint p = c.point(j);
    TangentVector step = log(p, c.point(j + 1));
    step.components *= f;
    return exp(p, step).coords;
}

}  // namespace detail

/// c composed with phi, evaluated by local geodesic interpolation along c.
/// The endpoints of the result equal the endpoints of c exactly.
inline DiscreteCurve reparameterize(const DiscreteCurve& c, const Diffeo& phi) {
    std::vector<Vec3> pts(phi.segments() + 1);
    pts.front() = c[0];
    pts.back() = c[c.segments()];
    for (std::size_t i = 1; i < phi.segments(); ++i) pts[i] = detail::sample_curve(c, phi[i]);
    return DiscreteCurve(c.manifold(), std::move(pts));
}

/// Field w evaluated along c at phi(t_i): the two bracketing vectors are
/// transported to the interpolated point and blended linearly.
inline std::pair<DiscreteCurve, VectorField> reparameterize_field(const DiscreteCurve& c,
                                                                  const VectorField& w,
                                                                  const Diffeo& phi) {
    check_field(c, w);
    DiscreteCurve cr = reparameterize(c, phi);
    const std::size_t n = phi.segments();
    const std::size_t N = c.segments();
    VectorField out;
    out.comps.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double s = std::clamp(phi[i], 0.0, 1.0) * static_cast<double>(N);
        std::size_t j = std::min(static_cast<std::size_t>(s), N - 1);
        double f = s - static_cast<double>(j);
        ManifoldPoint x{c.manifold(), cr[i]};
        Vec3 a = detail::transport_components(c.manifold(), c[j], x.coords, w[j]);
        Vec3 b = detail::transport_components(c.manifold(), c[j + 1], x.coords, w[j + 1]);
        out[i] = a * (1.0 - f) + b * f;
    }
    return {std::move(cr), std::move(out)};
}

/// A path of curves c(s_k, t_i) on an (n+1) x (N+1) grid.
class CurvePath {
public:
    CurvePath(ManifoldId m, std::size_t n_rows, std::size_t n_cols, std::vector<Vec3> grid)
        : manifold_(m), rows_(n_rows), cols_(n_cols), grid_(std::move(grid)) {
        if (rows_ < 2 || cols_ < 3) throw ContractViolation("curve path grid is too small");
        if (grid_.size() != rows_ * cols_) throw ContractViolation("curve path grid size mismatch");
    }

    ManifoldId manifold() const { return manifold_; }
    std::size_t rows() const { return rows_; }      // n + 1
    std::size_t cols() const { return cols_; }      // N + 1
    std::size_t steps() const { return rows_ - 1; } // n
    std::size_t segments() const { return cols_ - 1; }

    const Vec3& at(std::size_t k, std::size_t i) const { return grid_[k * cols_ + i]; }
    Vec3& at(std::size_t k, std::size_t i) { return grid_[k * cols_ + i]; }
    const std::vector<Vec3>& flat() const { return grid_; }

    DiscreteCurve row(std::size_t k) const {
        std::vector<Vec3> pts(grid_.begin() + static_cast<std::ptrdiff_t>(k * cols_),
                              grid_.begin() + static_cast<std::ptrdiff_t>((k + 1) * cols_));
        return DiscreteCurve(manifold_, std::move(pts));
    }

    void set_row(std::size_t k, const DiscreteCurve& c) {
        if (c.samples() != cols_ || c.manifold() != manifold_)
            throw ContractViolation("row replacement does not match the path grid");
        std::copy(c.points().begin(), c.points().end(),
                  grid_.begin() + static_cast<std::ptrdiff_t>(k * cols_));
    }

private:
    ManifoldId manifold_;
    std::size_t rows_, cols_;
    std::vector<Vec3> grid_;
};

}  // namespace curvematch
