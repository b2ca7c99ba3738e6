#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "curvematch/geodesic.hpp"

namespace curvematch {

/// Discrete L2 distance between same-grid curves: trapezoidal quadrature of
/// squared pointwise geodesic distances.
inline double l2_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    if (a.manifold() != b.manifold() || a.samples() != b.samples())
        throw ContractViolation("l2_distance needs curves on a common grid");
    std::vector<double> sq(a.samples());
    for (std::size_t i = 0; i < a.samples(); ++i) {
        double d = distance(a.point(i), b.point(i));
        sq[i] = d * d;
    }
    return std::sqrt(detail::trapezoid(sq, a.grid_step()));
}

/// Output of the path decomposition: the horizontal part of the path, the
/// propagated diffeomorphisms, and the vertical magnitudes per row.
struct PathDecomposition {
    CurvePath horizontal_path;
    std::vector<Diffeo> diffeos;               // diffeos[0] = identity
    std::vector<std::vector<double>> m_field;  // (n+1) x (N+1), zero first/last columns
    double max_repair_fraction = 0;            // largest per-step share of clipped increments
    bool repair_warning = false;               // true if that share exceeded 10%
};

/// Decompose a path of curves into horizontal part and diffeomorphism path:
/// per row, solve the vertical-magnitude ODE for m(s_k, .), propagate
/// phi(s_{k+1}) = phi(s_k) + (1/n) * m/|c_t| * phi_t by explicit Euler, and
/// build the horizontal rows as c(s_k) reparameterized by inverse(phi(s_k)).
inline PathDecomposition horizontal_part(const CurvePath& path, const ElasticParams& params) {
    params.validate();
    const std::size_t n = path.steps(), N = path.segments();
    const double ds = 1.0 / static_cast<double>(n);
    const double dt = 1.0 / static_cast<double>(N);

    std::vector<DiscreteCurve> rows;
    rows.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) rows.push_back(path.row(k));
    auto ws = path_velocity_s(path);

    PathDecomposition out{CurvePath(path.manifold(), path.rows(), path.cols(), path.flat()),
                          {}, {}, 0.0, false};
    out.diffeos.reserve(n + 1);
    out.diffeos.push_back(Diffeo::identity(N));
    out.m_field.resize(n + 1);

    for (std::size_t k = 0; k <= n; ++k) {
        Decomposition dec = decompose(rows[k], ws[k], params);
        out.m_field[k] = std::move(dec.m);
        if (k == n) break;

        VectorField vel = velocity(rows[k]);
        std::vector<double> phi_t = detail::fd_derivative(out.diffeos[k].values(), dt);
        std::vector<double> next = out.diffeos[k].values();
        for (std::size_t i = 0; i <= N; ++i) {
            double speed = detail::metric_norm(path.manifold(), rows[k][i], vel[i]);
            next[i] += ds * out.m_field[k][i] / speed * phi_t[i];
        }
        next.front() = 0.0;
        std::size_t clipped = detail::repair_monotone(next);
        out.max_repair_fraction =
            std::max(out.max_repair_fraction, static_cast<double>(clipped) / static_cast<double>(N));
        out.diffeos.emplace_back(std::move(next));
    }
    out.repair_warning = out.max_repair_fraction > 0.10;

    for (std::size_t k = 1; k <= n; ++k)
        out.horizontal_path.set_row(k, reparameterize(rows[k], inverse(out.diffeos[k])));
    return out;
}

/// Result of the iterated optimal matching.
struct MatchResult {
    DiscreteCurve matched_target;       // optimally reparameterized target
    Diffeo total_diffeo;                // matched_target ~ c1 composed with this
    GeodesicResult final_geodesic;      // geodesic from c0 to matched_target
    std::vector<double> gap_history;    // L2 gap per iteration
    std::vector<double> length_history; // geodesic length per iteration (+ final)
};

/// Alternate geodesic solves and horizontal-path decompositions until the
/// endpoint of the horizontal part stops moving: the optimal matching loop.
inline MatchResult optimal_match(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                 const ElasticParams& params, const SolverConfig& config = {},
                                 double threshold = -1.0, int max_match_iterations = 50) {
    params.validate();
    config.validate();
    if (c0.manifold() != c1.manifold() || c0.samples() != c1.samples())
        throw ContractViolation("optimal_match needs curves on a common grid");
    if (threshold <= 0) threshold = 1e-3 * arc_length(c0);

    const std::size_t N = c0.segments();
    DiscreteCurve target = c1;
    Diffeo total = Diffeo::identity(N);
    std::vector<double> gaps, lengths;
    CurvePath warm{c0.manifold(), 2, 3, std::vector<Vec3>(6)};  // replaced before first use
    bool have_warm = false;

    for (int iter = 0; iter < max_match_iterations; ++iter) {
        GeodesicResult geo = solve_geodesic(c0, target, params, config,
                                            have_warm ? &warm : nullptr);
        if (!geo.converged)
            throw NonConvergenceError("geodesic solve did not converge during matching");
        lengths.push_back(geo.length);

        PathDecomposition dec = horizontal_part(geo.path, params);
        DiscreteCurve endpoint = dec.horizontal_path.row(dec.horizontal_path.steps());
        double gap = l2_distance(endpoint, target);
        if (!gaps.empty() && gap > threshold && gap > 1.10 * gaps.back()) {
            gaps.push_back(gap);
            throw DivergenceError("matching gap increased by more than 10% between iterations",
                                  std::move(gaps));
        }
        gaps.push_back(gap);

        total = compose(total, inverse(dec.diffeos.back()));
        target = std::move(endpoint);
        warm = std::move(dec.horizontal_path);
        have_warm = true;
        if (gap <= threshold) break;
    }

    GeodesicResult fin = solve_geodesic(c0, target, params, config, have_warm ? &warm : nullptr);
    if (!fin.converged)
        throw NonConvergenceError("final geodesic solve did not converge");
    lengths.push_back(fin.length);
    return MatchResult{std::move(target), std::move(total), std::move(fin),
                       std::move(gaps), std::move(lengths)};
}

/// Dynamic-programming search over monotone lattice reparameterizations of
/// plane curves in SRV coordinates; an independent check of the quotient
/// distance.
struct OracleResult {
    double distance = 0;
    Diffeo phi;  // sampled on the oracle grid
};

inline OracleResult dp_reparam_oracle(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                      const ElasticParams& params, std::size_t grid_size) {
    params.validate();
    if (c0.manifold() != ManifoldId::Plane || c1.manifold() != ManifoldId::Plane)
        throw ContractViolation("the reparameterization oracle handles plane curves only");
    if (grid_size < 4 || grid_size > 200)
        throw ContractViolation("oracle grid size must lie in [4, 200]");

    const std::size_t G = grid_size;
    auto resample = [&](const DiscreteCurve& c) {
        if (c.segments() == G) return c;
        return reparameterize(c, Diffeo::identity(G));
    };
    DiscreteCurve r0 = resample(c0), r1 = resample(c1);
    SrvCurve s0 = srv_transform(r0), s1 = srv_transform(r1);
    const double dt = 1.0 / static_cast<double>(G);

    // q1 evaluated at fractional grid position u (piecewise linear).
    auto q1_at = [&](double u) {
        u = std::clamp(u, 0.0, static_cast<double>(G));
        std::size_t j = std::min(static_cast<std::size_t>(u), G - 1);
        double f = u - static_cast<double>(j);
        return s1.q[j] * (1.0 - f) + s1.q[j + 1] * f;
    };

    // Cost of the lattice edge (i,j) -> (i+di, j+dj): trapezoidal quadrature
    // of |q0(t) - sqrt(sigma) q1(phi(t))|^2 over the di spanned subintervals.
    auto edge_cost = [&](std::size_t i, std::size_t j, std::size_t di, std::size_t dj) {
        double sigma = static_cast<double>(dj) / static_cast<double>(di);
        double rs = std::sqrt(sigma);
        double sum = 0;
        for (std::size_t l = 0; l <= di; ++l) {
            double u = static_cast<double>(j) + sigma * static_cast<double>(l);
            Vec3 d = s0.q[i + l] - q1_at(u) * rs;
            double val = dot(d, d);
            sum += (l == 0 || l == di) ? 0.5 * val : val;
        }
        return sum * dt;
    };

    constexpr std::size_t W = 12;  // maximum lattice slope numerator/denominator
    std::vector<std::pair<std::size_t, std::size_t>> steps;
    for (std::size_t di = 1; di <= W; ++di)
        for (std::size_t dj = 1; dj <= W; ++dj)
            if (std::gcd(di, dj) == 1) steps.emplace_back(di, dj);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost((G + 1) * (G + 1), inf);
    std::vector<int> back((G + 1) * (G + 1), -1);
    auto idx = [&](std::size_t i, std::size_t j) { return i * (G + 1) + j; };
    cost[idx(0, 0)] = 0;
    for (std::size_t i = 0; i <= G; ++i) {
        for (std::size_t j = 0; j <= G; ++j) {
            double base = cost[idx(i, j)];
            if (base == inf) continue;
            for (std::size_t st = 0; st < steps.size(); ++st) {
                auto [di, dj] = steps[st];
                if (i + di > G || j + dj > G) continue;
                double cand = base + edge_cost(i, j, di, dj);
                std::size_t t = idx(i + di, j + dj);
                if (cand < cost[t]) {
                    cost[t] = cand;
                    back[t] = static_cast<int>(st);
                }
            }
        }
    }

    Vec3 dstart = s1.start - s0.start;
    OracleResult out{std::sqrt(cost[idx(G, G)] + dot(dstart, dstart)), Diffeo::identity(G)};

    // Recover the lattice path and sample phi on the uniform grid.
    std::vector<std::pair<std::size_t, std::size_t>> verts;
    std::size_t i = G, j = G;
    verts.emplace_back(i, j);
    while (i > 0 || j > 0) {
        auto [di, dj] = steps[static_cast<std::size_t>(back[idx(i, j)])];
        i -= di;
        j -= dj;
        verts.emplace_back(i, j);
    }
    std::reverse(verts.begin(), verts.end());
    std::vector<double> phi(G + 1);
    std::size_t seg = 0;
    for (std::size_t t = 0; t <= G; ++t) {
        while (seg + 1 < verts.size() && verts[seg + 1].first < t) ++seg;
        auto [ia, ja] = verts[seg];
        auto [ib, jb] = verts[seg + 1];
        double f = static_cast<double>(t - ia) / static_cast<double>(ib - ia);
        phi[t] = (static_cast<double>(ja) + f * static_cast<double>(jb - ja)) * dt;
    }
    phi.front() = 0.0;
    phi.back() = 1.0;
    out.phi = Diffeo(std::move(phi));
    return out;
}

}  // namespace curvematch
