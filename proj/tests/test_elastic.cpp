#include <gtest/gtest.h>

#include <cmath>

#include "curvematch/elastic.hpp"
#include "curvematch/geodesic.hpp"
#include "support/generators.hpp"

using namespace curvematch;

namespace {

const ElasticParams kDefault{};  // a = 1, b = 1/2

DiscreteCurve segment(std::size_t N) {
    std::vector<Vec3> pts(N + 1);
    for (std::size_t i = 0; i <= N; ++i) pts[i] = {static_cast<double>(i) / N, 0};
    return DiscreteCurve(ManifoldId::Plane, pts);
}

VectorField tangential_field(std::size_t N) {  // w(t) = (t, 0)
    VectorField w;
    w.comps.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) w[i] = {static_cast<double>(i) / N, 0};
    return w;
}

VectorField normal_field(std::size_t N) {  // w(t) = (0, t)
    VectorField w;
    w.comps.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) w[i] = {0, static_cast<double>(i) / N};
    return w;
}

constexpr ManifoldId kAll[] = {ManifoldId::Plane, ManifoldId::HyperbolicHalfPlane,
                               ManifoldId::Sphere};

double field_sup(const VectorField& w) {
    double s = 0;
    for (const auto& v : w.comps) s = std::max(s, norm(v));
    return s;
}

}  // namespace

TEST(ElasticInner, TangentialFieldGivesBSquared) {
    const std::size_t N = 64;
    DiscreteCurve c = segment(N);
    VectorField w = tangential_field(N);
    EXPECT_NEAR(elastic_inner(c, w, w, kDefault), 0.25, 1e-6);
    ElasticParams p{2.0, 0.7, 1e-12};
    EXPECT_NEAR(elastic_inner(c, w, w, p), 0.49, 1e-6);
}

TEST(ElasticInner, NormalFieldGivesASquared) {
    const std::size_t N = 64;
    DiscreteCurve c = segment(N);
    VectorField w = normal_field(N);
    EXPECT_NEAR(elastic_inner(c, w, w, kDefault), 1.0, 1e-6);
    ElasticParams p{1.5, 0.5, 1e-12};
    EXPECT_NEAR(elastic_inner(c, w, w, p), 2.25, 1e-6);
}

TEST(ElasticInner, SymmetricBilinearPositive) {
    testgen::Rng rng(2);
    const std::size_t N = 80;
    auto curve = testgen::random_curve(rng, ManifoldId::HyperbolicHalfPlane);
    DiscreteCurve c = curve.sample(N);
    VectorField w = testgen::random_field(rng).sample(curve, N);
    VectorField z = testgen::random_field(rng).sample(curve, N);
    double wz = elastic_inner(c, w, z, kDefault);
    double zw = elastic_inner(c, z, w, kDefault);
    EXPECT_NEAR(wz, zw, 1e-12 * (1 + std::abs(wz)));
    EXPECT_GT(elastic_inner(c, w, w, kDefault), 0.0);
}

TEST(ElasticInner, ReparameterizationInvariance) {
    // the metric is constant along the fibers; quadrature converges at
    // first order, so the deviation at N=400 is at most 0.6x the one at 200
    for (ManifoldId m : kAll) {
        testgen::Rng rng(57 + static_cast<int>(m));
        int healthy = 0;
        for (int trial = 0; trial < 12 && healthy < 8; ++trial) {
            auto curve = testgen::random_curve(rng, m);
            auto wf = testgen::random_field(rng);
            auto zf = testgen::random_field(rng);
            auto warp = testgen::random_diffeo(rng);
            double dev[2], mag[2];
            std::size_t grids[2] = {200, 400};
            for (int g = 0; g < 2; ++g) {
                std::size_t N = grids[g];
                DiscreteCurve c = curve.sample(N);
                VectorField w = wf.sample(curve, N);
                VectorField z = zf.sample(curve, N);
                double base = elastic_inner(c, w, z, kDefault);

                std::vector<Vec3> pts(N + 1);
                VectorField ww, zz;
                ww.comps.resize(N + 1);
                zz.comps.resize(N + 1);
                for (std::size_t i = 0; i <= N; ++i) {
                    double tau = warp(static_cast<double>(i) / N);
                    pts[i] = curve.point(tau);
                    ww[i] = wf.at(curve, tau);
                    zz[i] = zf.at(curve, tau);
                }
                DiscreteCurve cw(m, pts);
                dev[g] = std::abs(elastic_inner(cw, ww, zz, kDefault) - base);
                mag[g] = std::abs(base);
            }
            if (mag[0] < 0.05) continue;  // skip near-cancelling pairings
            ++healthy;
            EXPECT_LE(dev[0], 5e-2 * mag[0]) << manifold_name(m) << " trial " << trial;
            if (dev[0] > 1e-6 * mag[0]) {  // ratio is meaningless at rounding level
                EXPECT_LE(dev[1], 0.6 * dev[0]) << manifold_name(m) << " trial " << trial;
            }
        }
        EXPECT_GE(healthy, 8) << manifold_name(m);
    }
}

TEST(PathEnergy, ConstantPathIsZero) {
    testgen::Rng rng(3);
    DiscreteCurve c = testgen::random_curve(rng, ManifoldId::Sphere).sample(40);
    std::vector<Vec3> grid;
    for (int k = 0; k < 5; ++k)
        grid.insert(grid.end(), c.points().begin(), c.points().end());
    CurvePath path(ManifoldId::Sphere, 5, 41, std::move(grid));
    EXPECT_NEAR(path_energy(path, kDefault), 0.0, 1e-15);
    EXPECT_NEAR(path_length(path, kDefault), 0.0, 1e-12);
}

TEST(PathEnergy, TranslatingSegment) {
    // c(s,t) = (t, s): only the start-point term contributes
    const std::size_t n = 10, N = 50;
    std::vector<Vec3> grid((n + 1) * (N + 1));
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t i = 0; i <= N; ++i)
            grid[k * (N + 1) + i] = {static_cast<double>(i) / N, static_cast<double>(k) / n};
    CurvePath path(ManifoldId::Plane, n + 1, N + 1, std::move(grid));
    EXPECT_NEAR(path_energy(path, kDefault), 1.0, 1e-6);
    EXPECT_NEAR(path_length(path, kDefault), 1.0, 1e-6);
    // Cauchy-Schwarz: length^2 <= energy
    EXPECT_LE(path_length(path, kDefault) * path_length(path, kDefault),
              path_energy(path, kDefault) + 1e-9);
}

TEST(PathEnergy, AgreesWithSrvRoute) {
    // c(s,t) = (t, s t): two independent length computations within 1%
    const std::size_t n = 20, N = 100;
    std::vector<Vec3> grid((n + 1) * (N + 1));
    for (std::size_t k = 0; k <= n; ++k)
        for (std::size_t i = 0; i <= N; ++i) {
            double t = static_cast<double>(i) / N, s = static_cast<double>(k) / n;
            grid[k * (N + 1) + i] = {t, s * t};
        }
    CurvePath path(ManifoldId::Plane, n + 1, N + 1, std::move(grid));
    double quad = path_length(path, kDefault);
    double srv = srv_path_length(path);
    EXPECT_LE(std::abs(quad - srv), 0.01 * srv);
}

TEST(Decompose, PurelyVerticalInput) {
    // w = m0 * v with m0 vanishing at the ends: horizontal part ~ 0
    for (ManifoldId m : kAll) {
        testgen::Rng rng(71 + static_cast<int>(m));
        const std::size_t N = 200;
        auto curve = testgen::random_curve(rng, m);
        DiscreteCurve c = curve.sample(N);
        auto frame = detail::curve_frame(c);
        testgen::AnalyticDiffeo bump = testgen::random_diffeo(rng);
        VectorField w;
        w.comps.resize(N + 1);
        for (std::size_t i = 0; i <= N; ++i) {
            double t = static_cast<double>(i) / N;
            double m0 = bump(t) - t;  // smooth, zero at both ends
            w[i] = frame.unit[i] * m0;
        }
        Decomposition dec = decompose(c, w, kDefault);
        EXPECT_LE(field_sup(dec.horizontal), 1e-3 * std::max(field_sup(w), 1e-9))
            << manifold_name(m);
    }
}

TEST(Decompose, ZeroRightHandSideGivesZeroM) {
    const std::size_t N = 64;
    DiscreteCurve c = segment(N);
    VectorField w;
    w.comps.assign(N + 1, Vec3{0, 1});  // constant normal field
    Decomposition dec = decompose(c, w, kDefault);
    for (double mi : dec.m) EXPECT_EQ(mi, 0.0);
    for (std::size_t i = 0; i <= N; ++i) EXPECT_EQ(norm(dec.horizontal[i] - w[i]), 0.0);
}

TEST(Decompose, StructuralInvariants) {
    testgen::Rng rng(5);
    const std::size_t N = 100;
    auto curve = testgen::random_curve(rng, ManifoldId::Sphere);
    DiscreteCurve c = curve.sample(N);
    VectorField w = testgen::random_field(rng).sample(curve, N);
    Decomposition dec = decompose(c, w, kDefault);
    EXPECT_EQ(dec.m.front(), 0.0);
    EXPECT_EQ(dec.m.back(), 0.0);
    auto frame = detail::curve_frame(c);
    for (std::size_t i = 0; i <= N; ++i) {
        EXPECT_EQ(norm(dec.vertical[i] - frame.unit[i] * dec.m[i]), 0.0);
        EXPECT_LE(norm(dec.vertical[i] + dec.horizontal[i] - w[i]),
                  1e-15 * (1 + norm(w[i])));  // one rounding step of w - mv + mv
    }
}

TEST(Decompose, OrthogonalityAgainstQuadrature) {
    // G(w_hor, eta*v) vanishes for all vertical test fields; the check runs
    // through elastic_inner, an independent quadrature of the metric
    for (ManifoldId m : kAll) {
        testgen::Rng rng(83 + static_cast<int>(m));
        const std::size_t N = 200;
        auto curve = testgen::random_curve(rng, m);
        auto wf = testgen::random_field(rng);
        DiscreteCurve c = curve.sample(N);
        VectorField w = wf.sample(curve, N);
        Decomposition dec = decompose(c, w, kDefault);
        auto frame = detail::curve_frame(c);
        double wn = std::sqrt(elastic_inner(c, w, w, kDefault));
        for (int trial = 0; trial < 20; ++trial) {
            auto eta = testgen::random_diffeo(rng);
            VectorField ev;
            ev.comps.resize(N + 1);
            for (std::size_t i = 0; i <= N; ++i) {
                double t = static_cast<double>(i) / N;
                ev[i] = frame.unit[i] * (eta(t) - t);
            }
            double en = std::sqrt(elastic_inner(c, ev, ev, kDefault));
            if (en < 1e-6) continue;
            double g = elastic_inner(c, dec.horizontal, ev, kDefault);
            EXPECT_LE(std::abs(g), 1e-2 * wn * en) << manifold_name(m) << " trial " << trial;
        }
    }
}

TEST(Decompose, OrthogonalityResidualHalvesWithN) {
    testgen::Rng rng(19);
    auto curve = testgen::random_curve(rng, ManifoldId::HyperbolicHalfPlane);
    auto wf = testgen::random_field(rng);
    auto eta = testgen::random_diffeo(rng);
    double res[2];
    std::size_t grids[2] = {100, 200};
    for (int g = 0; g < 2; ++g) {
        std::size_t N = grids[g];
        DiscreteCurve c = curve.sample(N);
        VectorField w = wf.sample(curve, N);
        Decomposition dec = decompose(c, w, kDefault);
        auto frame = detail::curve_frame(c);
        VectorField ev;
        ev.comps.resize(N + 1);
        for (std::size_t i = 0; i <= N; ++i) {
            double t = static_cast<double>(i) / N;
            ev[i] = frame.unit[i] * (eta(t) - t);
        }
        res[g] = std::abs(elastic_inner(c, dec.horizontal, ev, kDefault));
    }
    EXPECT_LE(res[1], 0.55 * res[0] + 1e-12);
}

TEST(Decompose, Linearity) {
    testgen::Rng rng(7);
    const std::size_t N = 120;
    auto curve = testgen::random_curve(rng, ManifoldId::Plane);
    DiscreteCurve c = curve.sample(N);
    VectorField w1 = testgen::random_field(rng).sample(curve, N);
    VectorField w2 = testgen::random_field(rng).sample(curve, N);
    const double al = 1.7, be = -0.6;
    VectorField mix;
    mix.comps.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) mix[i] = w1[i] * al + w2[i] * be;
    auto m1 = decompose(c, w1, kDefault).m;
    auto m2 = decompose(c, w2, kDefault).m;
    auto mm = decompose(c, mix, kDefault).m;
    double scale = 0;
    for (double v : mm) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i <= N; ++i)
        EXPECT_NEAR(mm[i], al * m1[i] + be * m2[i], 1e-9 * (1 + scale));
}

TEST(Decompose, IdempotenceOnHorizontalPart) {
    for (ManifoldId m : kAll) {
        testgen::Rng rng(303 + static_cast<int>(m));
        const std::size_t N = 200;
        auto curve = testgen::random_curve(rng, m);
        DiscreteCurve c = curve.sample(N);
        VectorField w = testgen::random_field(rng).sample(curve, N);
        Decomposition first = decompose(c, w, kDefault);
        Decomposition second = decompose(c, first.horizontal, kDefault);
        double mmax = 0;
        for (double v : second.m) mmax = std::max(mmax, std::abs(v));
        EXPECT_LE(mmax, 1e-3 * std::max(field_sup(w), 1e-9)) << manifold_name(m);
    }
}

TEST(Decompose, DiscreteOdeResidualIsSolverExact) {
    // plugging m back into the centered-difference system reproduces the
    // right-hand side to linear-solver accuracy
    testgen::Rng rng(13);
    const std::size_t N = 150;
    auto curve = testgen::random_curve(rng, ManifoldId::Sphere);
    DiscreteCurve c = curve.sample(N);
    VectorField w = testgen::random_field(rng).sample(curve, N);
    Decomposition dec = decompose(c, w, kDefault);

    auto frame = detail::curve_frame(c);
    VectorField dvel = covariant_derivative(c, frame.vel);
    VectorField dv = covariant_derivative(c, frame.unit);
    VectorField dw = covariant_derivative(c, w);
    VectorField d2w = covariant_derivative(c, dw);
    const double dt = c.grid_step();
    const double ab2 = (kDefault.a / kDefault.b) * (kDefault.a / kDefault.b);
    double worst = 0;
    for (std::size_t i = 1; i < N; ++i) {
        double beta = detail::metric_dot(c.manifold(), c[i], dvel[i], frame.unit[i]) / frame.speed[i];
        double gamma = ab2 * detail::metric_dot(c.manifold(), c[i], dv[i], dv[i]);
        double rhs = detail::metric_dot(c.manifold(), c[i], d2w[i], frame.unit[i]) -
                     (ab2 - 1.0) * detail::metric_dot(c.manifold(), c[i], dw[i], dv[i]) -
                     beta * detail::metric_dot(c.manifold(), c[i], dw[i], frame.unit[i]);
        double lhs = (dec.m[i + 1] - 2 * dec.m[i] + dec.m[i - 1]) / (dt * dt) -
                     beta * (dec.m[i + 1] - dec.m[i - 1]) / (2 * dt) - gamma * dec.m[i];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Decompose, HorizontalityEquationResidualDecreases) {
    // the horizontal part satisfies the first-order horizontality equation
    // with residual shrinking under grid refinement
    testgen::Rng rng(29);
    auto curve = testgen::random_curve(rng, ManifoldId::HyperbolicHalfPlane);
    auto wf = testgen::random_field(rng);
    const double ab2 = (kDefault.a / kDefault.b) * (kDefault.a / kDefault.b);
    double res[2];
    std::size_t grids[2] = {100, 200};
    for (int g = 0; g < 2; ++g) {
        std::size_t N = grids[g];
        DiscreteCurve c = curve.sample(N);
        VectorField w = wf.sample(curve, N);
        Decomposition dec = decompose(c, w, kDefault);
        auto frame = detail::curve_frame(c);
        VectorField dvel = covariant_derivative(c, frame.vel);
        VectorField dv = covariant_derivative(c, frame.unit);
        VectorField dh = covariant_derivative(c, dec.horizontal);
        VectorField d2h = covariant_derivative(c, dh);
        double worst = 0;
        for (std::size_t i = 4; i + 4 <= N; ++i) {
            double r = (ab2 - 1.0) * detail::metric_dot(c.manifold(), c[i], dh[i], dv[i]) -
                       detail::metric_dot(c.manifold(), c[i], d2h[i], frame.unit[i]) +
                       detail::metric_dot(c.manifold(), c[i], dvel[i], frame.unit[i]) / frame.speed[i] *
                           detail::metric_dot(c.manifold(), c[i], dh[i], frame.unit[i]);
            worst = std::max(worst, std::abs(r));
        }
        res[g] = worst;
    }
    EXPECT_LE(res[1], 0.7 * res[0] + 1e-10);
}

TEST(Decompose, RejectsTinyGrids) {
    std::vector<Vec3> pts{{0, 0}, {0.25, 0}, {0.5, 0}, {1, 0}};
    DiscreteCurve c(ManifoldId::Plane, pts);
    VectorField w;
    w.comps.assign(4, Vec3{0, 1});
    EXPECT_THROW(decompose(c, w, kDefault), ContractViolation);
}
