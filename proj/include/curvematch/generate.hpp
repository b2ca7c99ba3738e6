#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curvematch/curve.hpp"

namespace curvematch {

enum class CurveFamily { PlaneSpiral, PlaneS, H2Segments, S2Arcs };

inline CurveFamily family_from_name(const std::string& s) {
    if (s == "spiral") return CurveFamily::PlaneSpiral;
    if (s == "sshape") return CurveFamily::PlaneS;
    if (s == "segments") return CurveFamily::H2Segments;
    if (s == "arcs") return CurveFamily::S2Arcs;
    throw ContractViolation("unknown curve family: " + s +
                            " (expected spiral|sshape|segments|arcs)");
}

struct GeneratedPair {
    DiscreteCurve c0, c1;
};

namespace detail {

// Tiny deterministic generator (splitmix64); identical streams on every
// platform for a given seed.
struct SeededRng {
    std::uint64_t state;
    explicit SeededRng(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {}
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

using CurveFun = std::function<Vec3(double)>;

inline DiscreteCurve sample_fun(ManifoldId m, const CurveFun& f, std::size_t N) {
    std::vector<Vec3> pts(N + 1);
    for (std::size_t i = 0; i <= N; ++i) pts[i] = f(static_cast<double>(i) / static_cast<double>(N));
    return DiscreteCurve(m, std::move(pts));
}

// Analytic sine reparameterizations used to vary the initial matching
// problem without changing the underlying shapes.
inline double variant_warp(int variant, double t) {
    switch (variant) {
        case 1: return t + 0.15 * std::sin(M_PI * t);
        case 2: return t - 0.12 * std::sin(2.0 * M_PI * t) * (1.0 - t);
        case 3: return t + 0.10 * std::sin(M_PI * t) * t;
        case 4: return t - 0.14 * std::sin(M_PI * t);
        default: return t;
    }
}

}  // namespace detail

/// Seeded pair of test curves in the style of the reference experiments:
/// plane spirals and S-shapes, half-plane segments, spherical arcs. The
/// parameterization variant (0..4) warps the sampling of one of the two
/// curves while leaving both shapes fixed; variants 1-2 rewarp the target,
/// variants 3-4 the source.
inline GeneratedPair generate_pair(CurveFamily family, std::uint64_t seed, std::size_t N,
                                   int variant = 0) {
    if (N < 8) throw ContractViolation("generated curves need at least N = 8 segments");
    if (variant < 0 || variant > 4) throw ContractViolation("parameterization variant must be 0..4");
    detail::SeededRng rng(seed * 1000003ULL + static_cast<std::uint64_t>(17));

    detail::CurveFun f0, f1;
    ManifoldId mfd = ManifoldId::Plane;
    switch (family) {
        case CurveFamily::PlaneSpiral: {
            double w0 = rng.uniform(2.4, 3.0), w1 = w0 + rng.uniform(0.3, 0.7);
            double r0 = rng.uniform(0.25, 0.35), g0 = rng.uniform(0.55, 0.75);
            double r1 = rng.uniform(0.25, 0.35), g1 = rng.uniform(0.55, 0.75);
            f0 = [=](double t) {
                double r = r0 + g0 * t, th = w0 * t;
                return Vec3{r * std::cos(th), r * std::sin(th)};
            };
            f1 = [=](double t) {
                double r = r1 + g1 * t, th = w1 * t + 0.4;
                return Vec3{0.15 + r * std::cos(th), r * std::sin(th)};
            };
            break;
        }
        case CurveFamily::PlaneS: {
            double a0 = rng.uniform(0.22, 0.3), a1 = rng.uniform(0.22, 0.3);
            double p1 = rng.uniform(0.85, 1.15);
            f0 = [=](double t) { return Vec3{t, a0 * std::sin(2.0 * M_PI * t)}; };
            f1 = [=](double t) { return Vec3{t, -a1 * std::sin(2.0 * M_PI * p1 * t) + 0.1}; };
            break;
        }
        case CurveFamily::H2Segments: {
            mfd = ManifoldId::HyperbolicHalfPlane;
            Vec3 a0{-0.6 + rng.uniform(-0.05, 0.05), 1.05 + rng.uniform(-0.05, 0.05)};
            Vec3 a1{-0.15 + rng.uniform(-0.04, 0.04), 1.45 + rng.uniform(-0.05, 0.05)};
            Vec3 b0{0.15 + rng.uniform(-0.04, 0.04), 1.45 + rng.uniform(-0.05, 0.05)};
            Vec3 b1{0.6 + rng.uniform(-0.05, 0.05), 1.05 + rng.uniform(-0.05, 0.05)};
            f0 = [=](double t) { return a0 * (1.0 - t) + a1 * t; };
            f1 = [=](double t) { return b0 * (1.0 - t) + b1 * t; };
            break;
        }
        case CurveFamily::S2Arcs: {
            mfd = ManifoldId::Sphere;
            double tilt = rng.uniform(0.25, 0.45), len0 = rng.uniform(0.9, 1.2);
            double tilt1 = rng.uniform(0.55, 0.8), len1 = rng.uniform(0.9, 1.2);
            f0 = [=](double t) {
                double al = -0.5 * len0 + len0 * t;
                Vec3 p{std::sin(tilt) * std::cos(al), std::sin(al), std::cos(tilt) * std::cos(al)};
                return normalized(p);
            };
            f1 = [=](double t) {
                double al = -0.5 * len1 + len1 * t;
                double c = std::cos(al), s = std::sin(al);
                Vec3 p{std::sin(tilt1) * c, s * std::cos(0.3) + 0.15 * c,
                       std::cos(tilt1) * c - 0.1 * s};
                return normalized(p);
            };
            break;
        }
    }

    auto warp0 = [&](double t) { return detail::variant_warp(variant >= 3 ? variant : 0, t); };
    auto warp1 = [&](double t) { return detail::variant_warp(variant <= 2 ? variant : 0, t); };
    detail::CurveFun g0 = [&, f0](double t) { return f0(warp0(t)); };
    detail::CurveFun g1 = [&, f1](double t) { return f1(warp1(t)); };
    return GeneratedPair{detail::sample_fun(mfd, g0, N), detail::sample_fun(mfd, g1, N)};
}

}  // namespace curvematch
