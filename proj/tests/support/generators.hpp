#pragma once

// Seeded analytic test-data generators. Everything is a closed-form function
// of t (and s for paths) so the same instance can be sampled at several grid
// resolutions when a test checks convergence under refinement.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "curvematch/curve.hpp"
#include "curvematch/elastic.hpp"

namespace testgen {

using curvematch::DiscreteCurve;
using curvematch::Diffeo;
using curvematch::CurvePath;
using curvematch::ManifoldId;
using curvematch::Vec3;
using curvematch::VectorField;

struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed * 2654435761ULL + 1442695040888963407ULL) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

// c0 + c1*t + sum_j amp_j sin(pi j t + phase_j)
struct ScalarFun {
    double c0 = 0, c1 = 0;
    std::vector<std::pair<double, double>> modes;

    double operator()(double t) const {
        double v = c0 + c1 * t;
        for (std::size_t j = 0; j < modes.size(); ++j)
            v += modes[j].first * std::sin(M_PI * static_cast<double>(j + 1) * t + modes[j].second);
        return v;
    }
    double deriv(double t) const {
        double v = c1;
        for (std::size_t j = 0; j < modes.size(); ++j) {
            double w = M_PI * static_cast<double>(j + 1);
            v += modes[j].first * w * std::cos(w * t + modes[j].second);
        }
        return v;
    }
};

inline ScalarFun random_fun(Rng& rng, double c0_lo, double c0_hi, double lin_lo, double lin_hi,
                            int n_modes, double amp) {
    ScalarFun f;
    f.c0 = rng.uniform(c0_lo, c0_hi);
    f.c1 = rng.uniform(lin_lo, lin_hi);
    for (int j = 1; j <= n_modes; ++j)
        f.modes.emplace_back(rng.uniform(-amp, amp) / static_cast<double>(j * j),
                             rng.uniform(0.0, 2.0 * M_PI));
    return f;
}

// Sine warp vanishing at 0 and 1; slope bounded away from zero by budget.
struct AnalyticDiffeo {
    std::vector<double> amps;  // mode j = index+1, phase 0

    double operator()(double t) const {
        double v = t;
        for (std::size_t j = 0; j < amps.size(); ++j)
            v += amps[j] * std::sin(M_PI * static_cast<double>(j + 1) * t);
        return v;
    }
    double deriv(double t) const {
        double v = 1;
        for (std::size_t j = 0; j < amps.size(); ++j) {
            double w = M_PI * static_cast<double>(j + 1);
            v += amps[j] * w * std::cos(w * t);
        }
        return v;
    }
    Diffeo sample(std::size_t N) const {
        std::vector<double> vals(N + 1);
        for (std::size_t i = 0; i <= N; ++i)
            vals[i] = (*this)(static_cast<double>(i) / static_cast<double>(N));
        vals.front() = 0.0;
        vals.back() = 1.0;
        return Diffeo(std::move(vals));
    }
};

inline AnalyticDiffeo random_diffeo(Rng& rng, int n_modes = 3, double slope_budget = 0.6) {
    AnalyticDiffeo d;
    double used = 0;
    for (int j = 1; j <= n_modes; ++j) {
        double cap = (slope_budget - used) / (M_PI * static_cast<double>(j) *
                                              static_cast<double>(n_modes - j + 1));
        double a = rng.uniform(-cap, cap);
        used += std::abs(a) * M_PI * static_cast<double>(j);
        d.amps.push_back(a);
    }
    return d;
}

struct AnalyticCurve {
    ManifoldId mfd = ManifoldId::Plane;
    ScalarFun u, v;  // plane: (x,y); h2: (x, log y); sphere: (theta, phi)

    Vec3 point(double t) const {
        switch (mfd) {
            case ManifoldId::Plane: return {u(t), v(t)};
            case ManifoldId::HyperbolicHalfPlane: return {u(t), std::exp(v(t))};
            case ManifoldId::Sphere: {
                double th = u(t), ph = v(t);
                return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            }
        }
        return {};
    }
    Vec3 velocity(double t) const {
        switch (mfd) {
            case ManifoldId::Plane: return {u.deriv(t), v.deriv(t)};
            case ManifoldId::HyperbolicHalfPlane: return {u.deriv(t), std::exp(v(t)) * v.deriv(t)};
            case ManifoldId::Sphere: {
                double th = u(t), ph = v(t), dth = u.deriv(t), dph = v.deriv(t);
                return {dth * std::cos(th) * std::cos(ph) - dph * std::sin(th) * std::sin(ph),
                        dth * std::cos(th) * std::sin(ph) + dph * std::sin(th) * std::cos(ph),
                        -dth * std::sin(th)};
            }
        }
        return {};
    }
    DiscreteCurve sample(std::size_t N) const {
        std::vector<Vec3> pts(N + 1);
        for (std::size_t i = 0; i <= N; ++i)
            pts[i] = point(static_cast<double>(i) / static_cast<double>(N));
        return DiscreteCurve(mfd, std::move(pts));
    }
};

inline AnalyticCurve random_curve(Rng& rng, ManifoldId mfd) {
    AnalyticCurve c;
    c.mfd = mfd;
    switch (mfd) {
        case ManifoldId::Plane:
            c.u = random_fun(rng, -0.4, 0.0, 0.8, 1.2, 3, 0.18);
            c.v = random_fun(rng, -0.3, 0.3, -0.3, 0.3, 3, 0.35);
            break;
        case ManifoldId::HyperbolicHalfPlane:
            c.u = random_fun(rng, -0.5, -0.2, 0.6, 1.0, 3, 0.15);
            c.v = random_fun(rng, -0.2, 0.2, -0.3, 0.3, 2, 0.25);  // log y stays bounded
            break;
        case ManifoldId::Sphere:
            c.u = random_fun(rng, 1.2, 1.5, -0.25, 0.25, 2, 0.2);  // theta near the equator
            c.v = random_fun(rng, -0.6, -0.4, 0.8, 1.2, 3, 0.15);
            break;
    }
    return c;
}

// Ambient-coordinate field; projected onto the tangent space when sampled.
struct AnalyticField {
    ScalarFun fx, fy, fz;

    Vec3 raw(double t) const { return {fx(t), fy(t), fz(t)}; }
    Vec3 raw_deriv(double t) const { return {fx.deriv(t), fy.deriv(t), fz.deriv(t)}; }

    Vec3 at(const AnalyticCurve& c, double t) const {
        Vec3 u = raw(t);
        if (c.mfd == ManifoldId::Sphere) {
            Vec3 p = c.point(t);
            return u - p * curvematch::dot(p, u);
        }
        return {u.x, u.y};
    }

    // Analytic covariant derivative of the (projected) field along c.
    Vec3 covariant(const AnalyticCurve& c, double t) const {
        switch (c.mfd) {
            case ManifoldId::Plane: {
                Vec3 d = raw_deriv(t);
                return {d.x, d.y};
            }
            case ManifoldId::HyperbolicHalfPlane: {
                Vec3 w = raw(t), dw = raw_deriv(t), cd = c.velocity(t);
                double y = std::exp(c.v(t));
                return {dw.x - (cd.x * w.y + cd.y * w.x) / y,
                        dw.y + (cd.x * w.x - cd.y * w.y) / y};
            }
            case ManifoldId::Sphere: {
                Vec3 p = c.point(t), dp = c.velocity(t);
                Vec3 u = raw(t), du = raw_deriv(t);
                double up = curvematch::dot(u, p);
                Vec3 wd = du - p * (curvematch::dot(du, p) + curvematch::dot(u, dp)) - dp * up;
                return wd - p * curvematch::dot(wd, p);
            }
        }
        return {};
    }

    VectorField sample(const AnalyticCurve& c, std::size_t N) const {
        VectorField f;
        f.comps.resize(N + 1);
        for (std::size_t i = 0; i <= N; ++i)
            f[i] = at(c, static_cast<double>(i) / static_cast<double>(N));
        return f;
    }
};

inline AnalyticField random_field(Rng& rng, double amp = 0.5) {
    AnalyticField f;
    f.fx = random_fun(rng, -amp, amp, -amp, amp, 3, amp);
    f.fy = random_fun(rng, -amp, amp, -amp, amp, 3, amp);
    f.fz = random_fun(rng, -amp, amp, -amp, amp, 3, amp);
    return f;
}

// Path of curves: geodesic interpolation between two random curves, sampled
// through an s-dependent warp of the parameter so that generic paths carry
// both horizontal and vertical speed components.
struct AnalyticPath {
    AnalyticCurve c0, c1;
    std::vector<double> warp_amp;    // t-mode amplitudes
    std::vector<double> warp_freq;   // s-frequencies
    std::vector<double> warp_phase;

    double warp(double s, double t) const {
        double v = t;
        for (std::size_t j = 0; j < warp_amp.size(); ++j)
            v += warp_amp[j] * std::sin(M_PI * warp_freq[j] * s + warp_phase[j]) *
                 std::sin(M_PI * static_cast<double>(j + 1) * t);
        return v;
    }

    Vec3 point(double s, double t) const {
        double tau = warp(s, t);
        curvematch::ManifoldPoint a{c0.mfd, c0.point(tau)};
        curvematch::TangentVector step = curvematch::log(a, {c0.mfd, c1.point(tau)});
        step.components *= s;
        return curvematch::exp(a, step).coords;
    }

    CurvePath sample(std::size_t n, std::size_t N) const {
        std::vector<Vec3> grid((n + 1) * (N + 1));
        for (std::size_t k = 0; k <= n; ++k)
            for (std::size_t i = 0; i <= N; ++i)
                grid[k * (N + 1) + i] = point(static_cast<double>(k) / static_cast<double>(n),
                                              static_cast<double>(i) / static_cast<double>(N));
        return CurvePath(c0.mfd, n + 1, N + 1, std::move(grid));
    }
};

inline AnalyticPath random_path(Rng& rng, ManifoldId mfd) {
    AnalyticPath p;
    p.c0 = random_curve(rng, mfd);
    p.c1 = random_curve(rng, mfd);
    for (int j = 1; j <= 2; ++j) {
        p.warp_amp.push_back(rng.uniform(-0.08, 0.08) / static_cast<double>(j));
        p.warp_freq.push_back(rng.uniform(0.5, 1.5));
        p.warp_phase.push_back(rng.uniform(0.0, 2.0 * M_PI));
    }
    return p;
}

}  // namespace testgen
