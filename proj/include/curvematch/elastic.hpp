#pragma once

#include <cmath>
#include <vector>

#include "curvematch/curve.hpp"

namespace curvematch {

/// Coefficients of the elastic metric plus solver tolerances.
struct ElasticParams {
    double a = 1.0;
    double b = 0.5;
    double ode_grid_tolerance = 1e-12;  // relative pivot floor for the tridiagonal solve

    void validate() const {
        if (!(a > 0) || !(b > 0)) throw ContractViolation("elastic coefficients must be positive");
    }
};

namespace detail {

struct CurveFrame {
    VectorField vel;            // c_t
    std::vector<double> speed;  // |c_t| (Riemannian)
    VectorField unit;           // v = c_t / |c_t|
};

inline CurveFrame curve_frame(const DiscreteCurve& c) {
    CurveFrame f;
    f.vel = velocity(c);
    f.speed.resize(c.samples());
    f.unit.comps.resize(c.samples());
    for (std::size_t i = 0; i < c.samples(); ++i) {
        f.speed[i] = metric_norm(c.manifold(), c[i], f.vel[i]);
        f.unit[i] = f.vel[i] * (1.0 / f.speed[i]);
    }
    return f;
}

}  // namespace detail

/// Elastic inner product of two fields along c: the start-point term plus
/// arc-length quadrature of the normal (a) and tangential (b) components of
/// the covariant derivatives.
inline double elastic_inner(const DiscreteCurve& c, const VectorField& w, const VectorField& z,
                            const ElasticParams& params) {
    params.validate();
    check_field(c, w);
    check_field(c, z);
    auto frame = detail::curve_frame(c);
    VectorField dw = covariant_derivative(c, w);
    VectorField dz = covariant_derivative(c, z);
    const double a2 = params.a * params.a, b2 = params.b * params.b;
    std::vector<double> integrand(c.samples());
    for (std::size_t i = 0; i < c.samples(); ++i) {
        const Vec3& p = c[i];
        double wt = detail::metric_dot(c.manifold(), p, dw[i], frame.unit[i]);
        double zt = detail::metric_dot(c.manifold(), p, dz[i], frame.unit[i]);
        double full = detail::metric_dot(c.manifold(), p, dw[i], dz[i]);
        integrand[i] = (a2 * (full - wt * zt) + b2 * wt * zt) / frame.speed[i];
    }
    double boundary = detail::metric_dot(c.manifold(), c[0], w[0], z[0]);
    return boundary + detail::trapezoid(integrand, c.grid_step());
}

/// Vertical/horizontal splitting of a field along a curve.
struct Decomposition {
    std::vector<double> m;  // vertical magnitude, m[0] = m[N] = 0
    VectorField vertical;   // m * v
    VectorField horizontal; // w - m * v
};

namespace detail {

// Thomas elimination for the tridiagonal system (lo, di, up) x = rhs.
inline std::vector<double> solve_tridiagonal(std::vector<double> lo, std::vector<double> di,
                                             std::vector<double> up, std::vector<double> rhs,
                                             double pivot_tol) {
    const std::size_t n = di.size();
    double scale = 0;
    for (double d : di) scale = std::max(scale, std::abs(d));
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(di[i - 1]) <= pivot_tol * scale)
            throw ConditioningError("tridiagonal solve lost its pivot");
        double f = lo[i] / di[i - 1];
        di[i] -= f * up[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    if (std::abs(di[n - 1]) <= pivot_tol * scale)
        throw ConditioningError("tridiagonal solve lost its pivot");
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
    return x;
}

}  // namespace detail

/// Split w into its vertical part m*v and horizontal remainder by solving
/// the two-point boundary-value problem
///   m'' - <D_t c_t / |c_t|, v> m' - (a/b)^2 |D_t v|^2 m = rhs(w),
/// m(0) = m(1) = 0, discretized with centered differences (tridiagonal).
inline Decomposition decompose(const DiscreteCurve& c, const VectorField& w,
                               const ElasticParams& params) {
    params.validate();
    check_field(c, w);
    if (c.segments() < 4) throw ContractViolation("decompose needs at least N = 4 segments");
    const ManifoldId mfd = c.manifold();
    const std::size_t N = c.segments();
    const double dt = c.grid_step();

    auto frame = detail::curve_frame(c);
    VectorField dvel = covariant_derivative(c, frame.vel);
    VectorField dv = covariant_derivative(c, frame.unit);
    VectorField dw = covariant_derivative(c, w);
    VectorField d2w = covariant_derivative(c, dw);

    const double ab2 = (params.a / params.b) * (params.a / params.b);
    std::vector<double> lo(N - 1), di(N - 1), up(N - 1), rhs(N - 1);
    const double idt2 = 1.0 / (dt * dt), i2dt = 1.0 / (2.0 * dt);
    for (std::size_t i = 1; i < N; ++i) {
        const Vec3& p = c[i];
        double beta = detail::metric_dot(mfd, p, dvel[i], frame.unit[i]) / frame.speed[i];
        double gamma = ab2 * detail::metric_dot(mfd, p, dv[i], dv[i]);
        lo[i - 1] = idt2 + beta * i2dt;
        di[i - 1] = -2.0 * idt2 - gamma;
        up[i - 1] = idt2 - beta * i2dt;
        rhs[i - 1] = detail::metric_dot(mfd, p, d2w[i], frame.unit[i]) -
                     (ab2 - 1.0) * detail::metric_dot(mfd, p, dw[i], dv[i]) -
                     beta * detail::metric_dot(mfd, p, dw[i], frame.unit[i]);
    }
    auto mi = detail::solve_tridiagonal(std::move(lo), std::move(di), std::move(up), std::move(rhs),
                                        params.ode_grid_tolerance);

    Decomposition out;
    out.m.assign(N + 1, 0.0);
    for (std::size_t i = 1; i < N; ++i) out.m[i] = mi[i - 1];
    out.vertical.comps.resize(N + 1);
    out.horizontal.comps.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        out.vertical[i] = frame.unit[i] * out.m[i];
        out.horizontal[i] = w[i] - out.vertical[i];
    }
    return out;
}

/// Finite-difference s-derivative fields of a path, one per row, each
/// tangent along its own row. Fourth-order stencils once the path has at
/// least five rows; the s-resolution is coarse (n ~ 10), so stencil order
/// dominates the quadrature accuracy of path lengths.
inline std::vector<VectorField> path_velocity_s(const CurvePath& path) {
    const std::size_t n = path.steps(), N = path.segments();
    const double i2ds = static_cast<double>(n) / 2.0;
    std::vector<VectorField> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k].comps.resize(N + 1);
    if (n == 1) {
        for (std::size_t i = 0; i <= N; ++i) {
            Vec3 d = path.at(1, i) - path.at(0, i);
            out[0][i] = d;
            out[1][i] = d;
        }
    } else if (n < 4) {
        for (std::size_t i = 0; i <= N; ++i) {
            out[0][i] = (path.at(1, i) * 4.0 - path.at(2, i) - path.at(0, i) * 3.0) * i2ds;
            for (std::size_t k = 1; k < n; ++k)
                out[k][i] = (path.at(k + 1, i) - path.at(k - 1, i)) * i2ds;
            out[n][i] = (path.at(n, i) * 3.0 - path.at(n - 1, i) * 4.0 + path.at(n - 2, i)) * i2ds;
        }
    } else {
        const double i12 = static_cast<double>(n) / 12.0;
        for (std::size_t i = 0; i <= N; ++i) {
            auto P = [&](std::size_t k) { return path.at(k, i); };
            out[0][i] = (P(0) * -25.0 + P(1) * 48.0 - P(2) * 36.0 + P(3) * 16.0 - P(4) * 3.0) * i12;
            out[1][i] = (P(0) * -3.0 - P(1) * 10.0 + P(2) * 18.0 - P(3) * 6.0 + P(4)) * i12;
            for (std::size_t k = 2; k + 2 <= n; ++k)
                out[k][i] = (P(k - 2) - P(k - 1) * 8.0 + P(k + 1) * 8.0 - P(k + 2)) * i12;
            out[n - 1][i] =
                (P(n) * 3.0 + P(n - 1) * 10.0 - P(n - 2) * 18.0 + P(n - 3) * 6.0 - P(n - 4)) * i12;
            out[n][i] = (P(n) * 25.0 - P(n - 1) * 48.0 + P(n - 2) * 36.0 - P(n - 3) * 16.0 +
                         P(n - 4) * 3.0) * i12;
        }
    }
    if (path.manifold() == ManifoldId::Sphere) {
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t i = 0; i <= N; ++i)
                out[k][i] = detail::project_tangent(path.manifold(), path.at(k, i), out[k][i]);
    }
    return out;
}

/// Discrete path energy: trapezoidal s-quadrature of the squared elastic
/// norm of the s-derivative field.
inline double path_energy(const CurvePath& path, const ElasticParams& params) {
    auto ws = path_velocity_s(path);
    std::vector<double> sq(path.rows());
    for (std::size_t k = 0; k < path.rows(); ++k) {
        DiscreteCurve row = path.row(k);
        sq[k] = elastic_inner(row, ws[k], ws[k], params);
    }
    return detail::trapezoid(sq, 1.0 / static_cast<double>(path.steps()));
}

/// Discrete path length: trapezoidal s-quadrature of the elastic norm.
inline double path_length(const CurvePath& path, const ElasticParams& params) {
    auto ws = path_velocity_s(path);
    std::vector<double> sp(path.rows());
    for (std::size_t k = 0; k < path.rows(); ++k) {
        DiscreteCurve row = path.row(k);
        sp[k] = std::sqrt(std::max(0.0, elastic_inner(row, ws[k], ws[k], params)));
    }
    return detail::trapezoid(sp, 1.0 / static_cast<double>(path.steps()));
}

}  // namespace curvematch
