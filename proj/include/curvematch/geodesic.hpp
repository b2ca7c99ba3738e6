#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

#include "curvematch/elastic.hpp"

namespace curvematch {

struct SolverConfig {
    int n_steps = 10;                // path discretization in s
    int max_iterations = 2000;
    double step_size = 1.0;          // initial line-search step
    double gradient_tolerance = 1e-2;  // on the gradient norm in the descent (H1) metric
    int renorm_every = 10;           // constant-speed renormalization cadence (0 = off)
    int threads = 0;                 // 0 = pick automatically
    double smoothing = -1.0;         // H1 gradient smoothing weight; < 0 = N^2/16

    void validate() const {
        if (n_steps < 2) throw ContractViolation("solver needs n_steps >= 2");
        if (max_iterations < 0 || !(step_size > 0) || !(gradient_tolerance > 0))
            throw ContractViolation("solver config requires positive step size and tolerance");
    }
};

struct GeodesicResult {
    CurvePath path;
    double length = 0;
    bool converged = false;
    int iterations = 0;
    double final_gradient_norm = 0;
    std::vector<double> energy_history;  // energy after each accepted step
};

// --- square root velocity representation (plane) --------------------------

struct SrvCurve {
    Vec3 start;
    std::vector<Vec3> q;  // c_t / sqrt(|c_t|)
};

inline SrvCurve srv_transform(const DiscreteCurve& c) {
    if (c.manifold() != ManifoldId::Plane)
        throw ContractViolation("the square-root-velocity transform is defined for plane curves");
    VectorField vel = velocity(c);
    SrvCurve out;
    out.start = c[0];
    out.q.resize(c.samples());
    for (std::size_t i = 0; i < c.samples(); ++i) out.q[i] = vel[i] * (1.0 / std::sqrt(norm(vel[i])));
    return out;
}

inline DiscreteCurve srv_inverse(const Vec3& start, const std::vector<Vec3>& q) {
    std::vector<Vec3> pts(q.size());
    pts[0] = start;
    const double dt = 1.0 / static_cast<double>(q.size() - 1);
    Vec3 prev = q[0] * norm(q[0]);
    for (std::size_t i = 1; i < q.size(); ++i) {
        Vec3 cur = q[i] * norm(q[i]);
        pts[i] = pts[i - 1] + (prev + cur) * (0.5 * dt);
        prev = cur;
    }
    return DiscreteCurve(ManifoldId::Plane, std::move(pts));
}

/// L2 distance between two SRV representations (start-point term included).
inline double srv_distance(const SrvCurve& s0, const SrvCurve& s1) {
    std::vector<double> integrand(s0.q.size());
    for (std::size_t i = 0; i < s0.q.size(); ++i) {
        Vec3 d = s1.q[i] - s0.q[i];
        integrand[i] = dot(d, d);
    }
    double l2 = detail::trapezoid(integrand, 1.0 / static_cast<double>(s0.q.size() - 1));
    Vec3 ds = s1.start - s0.start;
    return std::sqrt(dot(ds, ds) + l2);
}

/// Path length measured in flat SRV coordinates (plane, a=1, b=1/2 route).
inline double srv_path_length(const CurvePath& path) {
    if (path.manifold() != ManifoldId::Plane)
        throw ContractViolation("SRV path length is defined for plane paths");
    const std::size_t n = path.steps();
    std::vector<Vec3> starts(n + 1);
    std::vector<std::vector<Vec3>> qs(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        SrvCurve s = srv_transform(path.row(k));
        starts[k] = s.start;
        qs[k] = std::move(s.q);
    }
    auto dstart = detail::fd_derivative(starts, 1.0 / static_cast<double>(n));
    std::vector<double> speed(n + 1);
    const double dt = 1.0 / static_cast<double>(path.segments());
    auto qdot_norm2 = [&](std::size_t k) {
        std::vector<double> integrand(path.cols());
        const double i2ds = static_cast<double>(n) / 2.0;
        for (std::size_t i = 0; i < path.cols(); ++i) {
            Vec3 d;
            if (k == 0)
                d = (qs[1][i] * 4.0 - qs[2][i] - qs[0][i] * 3.0) * i2ds;
            else if (k == n)
                d = (qs[n][i] * 3.0 - qs[n - 1][i] * 4.0 + qs[n - 2][i]) * i2ds;
            else
                d = (qs[k + 1][i] - qs[k - 1][i]) * i2ds;
            integrand[i] = dot(d, d);
        }
        return detail::trapezoid(integrand, dt);
    };
    for (std::size_t k = 0; k <= n; ++k)
        speed[k] = std::sqrt(dot(dstart[k], dstart[k]) + qdot_norm2(k));
    return detail::trapezoid(speed, 1.0 / static_cast<double>(n));
}

/// Closed-form geodesic between plane curves for (a,b) = (1, 1/2): linear
/// interpolation of start points and SRV functions.
inline GeodesicResult geodesic_plane(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                     const SolverConfig& config = {}) {
    config.validate();
    if (c0.manifold() != ManifoldId::Plane || c1.manifold() != ManifoldId::Plane)
        throw ContractViolation("geodesic_plane needs two plane curves");
    if (c0.samples() != c1.samples())
        throw ContractViolation("geodesic_plane needs curves sampled on the same grid");
    SrvCurve s0 = srv_transform(c0);
    SrvCurve s1 = srv_transform(c1);
    const std::size_t n = static_cast<std::size_t>(config.n_steps);
    const std::size_t cols = c0.samples();

    // srv_inverse integrates q|q| and drifts O(1/N^2) from the original
    // samples; blend away the two known endpoint reconstruction errors so
    // that the path of two identical curves is exactly constant.
    DiscreteCurve recon0 = srv_inverse(s0.start, s0.q);
    DiscreteCurve recon1 = srv_inverse(s1.start, s1.q);

    std::vector<Vec3> grid((n + 1) * cols);
    std::vector<Vec3> q(cols);
    for (std::size_t k = 1; k < n; ++k) {
        double u = static_cast<double>(k) / static_cast<double>(n);
        Vec3 start = s0.start * (1.0 - u) + s1.start * u;
        for (std::size_t i = 0; i < cols; ++i) q[i] = s0.q[i] * (1.0 - u) + s1.q[i] * u;
        DiscreteCurve row = srv_inverse(start, q);
        for (std::size_t i = 0; i < cols; ++i) {
            Vec3 drift = (recon0[i] - c0[i]) * (1.0 - u) + (recon1[i] - c1[i]) * u;
            grid[k * cols + i] = row[i] - drift;
        }
    }
    for (std::size_t i = 0; i < cols; ++i) {
        grid[i] = c0[i];
        grid[n * cols + i] = c1[i];
    }
    GeodesicResult out{CurvePath(ManifoldId::Plane, n + 1, cols, std::move(grid)),
                       srv_distance(s0, s1), true, 0, 0.0, {}};
    return out;
}

// --- path straightening ----------------------------------------------------

namespace detail {

// Discrete path energy in midpoint form: the s-quadrature sums
// ||c_s||_G^2 evaluated on the geodesic-midpoint curve of each row pair,
// with c_s the straight row difference. No one-sided stencil appears in
// the s-direction, so the minimizer cannot shave the boundary terms, and
// every integrand value depends only on a small neighborhood of grid
// points, which keeps finite-difference gradients cheap.
class PathEnergyEngine {
public:
    PathEnergyEngine(ManifoldId m, std::size_t rows, std::size_t cols, std::vector<Vec3> pts,
                     const ElasticParams& params)
        : mfd_(m), rows_(rows), cols_(cols),
          ds_(1.0 / static_cast<double>(rows - 1)), dt_(1.0 / static_cast<double>(cols - 1)),
          a2_(params.a * params.a), b2_(params.b * params.b), pts_(std::move(pts)),
          g_((rows - 1) * cols), start_(rows - 1) {
        rebuild();
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double energy() const { return total_; }
    const std::vector<Vec3>& points() const { return pts_; }

    double tweight(std::size_t i) const { return (i == 0 || i + 1 == cols_) ? 0.5 * dt_ : dt_; }

    const Vec3& P(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        return pts[k * cols_ + i];
    }

    // Base point of midpoint row k at node i.
    Vec3 mid_point(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        Vec3 m = (P(pts, k, i) + P(pts, k + 1, i)) * 0.5;
        if (mfd_ == ManifoldId::Sphere) m = normalized(m);
        return m;
    }

    // c_s across the row pair (k, k+1), tangent-projected at the midpoint.
    Vec3 w_node(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        Vec3 raw = (P(pts, k + 1, i) - P(pts, k, i)) * (1.0 / ds_);
        if (mfd_ == ManifoldId::Sphere)
            raw = project_tangent(mfd_, mid_point(pts, k, i), raw);
        return raw;
    }

    // t-derivative along midpoint row k, tangent-projected.
    Vec3 vel_node(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        const std::size_t N = cols_ - 1;
        const double i2 = 1.0 / (2.0 * dt_);
        Vec3 raw;
        if (i == 0)
            raw = (mid_point(pts, k, 1) * 4.0 - mid_point(pts, k, 2) - mid_point(pts, k, 0) * 3.0) * i2;
        else if (i == N)
            raw = (mid_point(pts, k, N) * 3.0 - mid_point(pts, k, N - 1) * 4.0 +
                   mid_point(pts, k, N - 2)) * i2;
        else
            raw = (mid_point(pts, k, i + 1) - mid_point(pts, k, i - 1)) * i2;
        return project_tangent(mfd_, mid_point(pts, k, i), raw);
    }

    double start_term(const std::vector<Vec3>& pts, std::size_t k) const {
        Vec3 p = mid_point(pts, k, 0);
        if (mfd_ == ManifoldId::HyperbolicHalfPlane && !(p.y > 0))
            return std::numeric_limits<double>::infinity();
        Vec3 w0 = w_node(pts, k, 0);
        double v = metric_dot(mfd_, p, w0, w0);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    // Elastic integrand of midpoint row k at node i.
    double integrand(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        const std::size_t N = cols_ - 1;
        Vec3 p = mid_point(pts, k, i);
        if (mfd_ == ManifoldId::HyperbolicHalfPlane && !(p.y > 0))
            return std::numeric_limits<double>::infinity();
        Vec3 vel = vel_node(pts, k, i);
        double lambda = metric_norm(mfd_, p, vel);
        if (!(lambda > 1e-300)) return std::numeric_limits<double>::infinity();
        Vec3 v = vel * (1.0 / lambda);

        const double i2 = 1.0 / (2.0 * dt_);
        Vec3 dw;
        if (i == 0) {
            Vec3 w0 = w_node(pts, k, 0);
            Vec3 w1 = transport_components(mfd_, mid_point(pts, k, 1), p, w_node(pts, k, 1));
            Vec3 w2 = transport_components(mfd_, mid_point(pts, k, 2), p, w_node(pts, k, 2));
            dw = (w1 * 4.0 - w2 - w0 * 3.0) * i2;
        } else if (i == N) {
            Vec3 w0 = w_node(pts, k, N);
            Vec3 w1 = transport_components(mfd_, mid_point(pts, k, N - 1), p, w_node(pts, k, N - 1));
            Vec3 w2 = transport_components(mfd_, mid_point(pts, k, N - 2), p, w_node(pts, k, N - 2));
            dw = (w0 * 3.0 - w1 * 4.0 + w2) * i2;
        } else {
            Vec3 wp = transport_components(mfd_, mid_point(pts, k, i + 1), p, w_node(pts, k, i + 1));
            Vec3 wm = transport_components(mfd_, mid_point(pts, k, i - 1), p, w_node(pts, k, i - 1));
            dw = (wp - wm) * i2;
        }
        double wt = metric_dot(mfd_, p, dw, v);
        double full = metric_dot(mfd_, p, dw, dw);
        double g = (a2_ * (full - wt * wt) + b2_ * wt * wt) / lambda;
        return std::isfinite(g) ? g : std::numeric_limits<double>::infinity();
    }

    void rebuild() {
        total_ = 0;
        for (std::size_t k = 0; k + 1 < rows_; ++k) {
            start_[k] = start_term(pts_, k);
            double row = start_[k];
            for (std::size_t i = 0; i < cols_; ++i) {
                g_[k * cols_ + i] = integrand(pts_, k, i);
                row += tweight(i) * g_[k * cols_ + i];
            }
            total_ += ds_ * row;
        }
        if (!std::isfinite(total_)) total_ = std::numeric_limits<double>::infinity();
    }

    // Energy of an arbitrary point grid (used by the line search).
    double energy_of(const std::vector<Vec3>& pts) const {
        double total = 0;
        for (std::size_t k = 0; k + 1 < rows_; ++k) {
            double row = start_term(pts, k);
            for (std::size_t i = 0; i < cols_; ++i) {
                row += tweight(i) * integrand(pts, k, i);
                if (!std::isfinite(row)) return std::numeric_limits<double>::infinity();
            }
            total += ds_ * row;
        }
        return total;
    }

    // Midpoint rows whose cached values can change when grid row k moves.
    void affected_rows(std::size_t k, std::size_t* rows_out, std::size_t& count) const {
        count = 0;
        if (k > 0) rows_out[count++] = k - 1;
        if (k + 1 < rows_) rows_out[count++] = k;
    }

    void affected_cols(std::size_t i, std::size_t* cols_out, std::size_t& count) const {
        const std::size_t N = cols_ - 1;
        count = 0;
        auto push = [&](std::size_t c) {
            for (std::size_t j = 0; j < count; ++j)
                if (cols_out[j] == c) return;
            cols_out[count++] = c;
        };
        if (i > 0) push(i - 1);
        push(i);
        if (i < N) push(i + 1);
        if (i <= 2) push(0);
        if (i + 2 >= N) push(N);
    }

    // Energy change caused by replacing one grid point, evaluated against the
    // cached integrand values. pts must equal pts_ except possibly at (k,i).
    double energy_delta(const std::vector<Vec3>& pts, std::size_t k, std::size_t i) const {
        std::size_t rs[2], cs[5];
        std::size_t nr = 0, nc = 0;
        affected_rows(k, rs, nr);
        affected_cols(i, cs, nc);
        double delta = 0;
        for (std::size_t r = 0; r < nr; ++r) {
            std::size_t j = rs[r];
            double block = 0;
            for (std::size_t c = 0; c < nc; ++c) {
                std::size_t ii = cs[c];
                block += tweight(ii) * (integrand(pts, j, ii) - g_[j * cols_ + ii]);
            }
            if (i == 0) block += start_term(pts, j) - start_[j];
            delta += ds_ * block;
        }
        return delta;
    }

    int point_dim() const { return ambient_dim(mfd_); }

    // Central finite-difference gradient over all interior-row coordinates.
    void gradient(std::vector<double>& out, int threads) const {
        const std::size_t n = rows_ - 1;
        const int dim = point_dim();
        out.assign((rows_ - 2) * cols_ * static_cast<std::size_t>(dim), 0.0);
        auto worker = [&](std::size_t k_begin, std::size_t k_end) {
            std::vector<Vec3> scratch = pts_;
            for (std::size_t k = k_begin; k < k_end; ++k) {
                for (std::size_t i = 0; i < cols_; ++i) {
                    Vec3 saved = scratch[k * cols_ + i];
                    for (int d = 0; d < dim; ++d) {
                        double h = 1e-6 * (1.0 + std::abs(saved[d]));
                        Vec3 plus = saved, minus = saved;
                        plus[d] += h;
                        minus[d] -= h;
                        if (mfd_ == ManifoldId::Sphere) {
                            plus = normalized(plus);
                            minus = normalized(minus);
                        }
                        scratch[k * cols_ + i] = plus;
                        double ep = energy_delta(scratch, k, i);
                        scratch[k * cols_ + i] = minus;
                        double em = energy_delta(scratch, k, i);
                        scratch[k * cols_ + i] = saved;
                        out[((k - 1) * cols_ + i) * static_cast<std::size_t>(dim) +
                            static_cast<std::size_t>(d)] = (ep - em) / (2.0 * h);
                    }
                }
            }
        };
        int nt = threads;
        if (nt <= 0) nt = static_cast<int>(std::min<unsigned>(2, std::thread::hardware_concurrency()));
        nt = std::max(1, std::min<int>(nt, static_cast<int>(n - 1)));
        if (nt == 1) {
            worker(1, n);
        } else {
            std::vector<std::thread> pool;
            std::size_t chunk = (n - 1 + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
            for (int t = 0; t < nt; ++t) {
                std::size_t b = 1 + static_cast<std::size_t>(t) * chunk;
                std::size_t e = std::min(n, b + chunk);
                if (b >= e) break;
                pool.emplace_back(worker, b, e);
            }
            for (auto& th : pool) th.join();
        }
    }

    // Candidate grid for a step along -direction with factor alpha.
    std::vector<Vec3> stepped(const std::vector<double>& direction, double alpha) const {
        std::vector<Vec3> pts = pts_;
        const std::size_t n = rows_ - 1;
        const int dim = point_dim();
        for (std::size_t k = 1; k < n; ++k) {
            for (std::size_t i = 0; i < cols_; ++i) {
                Vec3& p = pts[k * cols_ + i];
                for (int d = 0; d < dim; ++d)
                    p[d] -= alpha * direction[((k - 1) * cols_ + i) * static_cast<std::size_t>(dim) +
                                              static_cast<std::size_t>(d)];
                if (mfd_ == ManifoldId::Sphere) p = normalized(p);
            }
        }
        return pts;
    }

    void adopt(std::vector<Vec3> pts) {
        pts_ = std::move(pts);
        rebuild();
    }

    // Resample interior rows so the path moves at constant elastic speed in s.
    // Keeps the result only if the energy does not increase.
    void renormalize_speed() {
        const std::size_t n = rows_ - 1;
        std::vector<double> cum(rows_, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            double row = start_[k];
            for (std::size_t i = 0; i < cols_; ++i) row += tweight(i) * g_[k * cols_ + i];
            cum[k + 1] = cum[k] + ds_ * std::sqrt(std::max(0.0, row));
        }
        if (!(cum[n] > 0)) return;
        std::vector<Vec3> pts = pts_;
        for (std::size_t k = 1; k < n; ++k) {
            double target = cum[n] * static_cast<double>(k) / static_cast<double>(n);
            std::size_t m = 0;
            while (m + 1 < n && cum[m + 1] < target) ++m;
            double span = cum[m + 1] - cum[m];
            double f = span > 0 ? (target - cum[m]) / span : 0.0;
            for (std::size_t i = 0; i < cols_; ++i) {
                ManifoldPoint a{mfd_, P(pts_, m, i)};
                TangentVector step = curvematch::log(a, ManifoldPoint{mfd_, P(pts_, m + 1, i)});
                step.components *= f;
                pts[k * cols_ + i] = curvematch::exp(a, step).coords;
            }
        }
        double before = total_;
        std::vector<Vec3> backup = pts_;
        adopt(std::move(pts));
        if (!(total_ <= before)) adopt(std::move(backup));
    }

private:
    ManifoldId mfd_;
    std::size_t rows_, cols_;
    double ds_, dt_;
    double a2_, b2_;
    std::vector<Vec3> pts_;
    std::vector<double> g_;      // integrand cache, row-major
    std::vector<double> start_;  // per-row start-point terms
    double total_ = 0;
};

// H1 smoothing of a per-row gradient slice: d = (I + sigma L)^{-1} g with L
// the Neumann second-difference matrix along t. Flattens the t-stiffness of
// the energy so that gradient steps move all frequencies at a similar rate.
inline void smooth_gradient_rows(const std::vector<double>& g, std::vector<double>& d,
                                 std::size_t inner_rows, std::size_t cols, int dim,
                                 double sigma) {
    d = g;
    if (sigma <= 0) return;
    std::vector<double> diag(cols), rhs(cols);
    for (std::size_t k = 0; k < inner_rows; ++k) {
        for (int c = 0; c < dim; ++c) {
            for (std::size_t i = 0; i < cols; ++i) {
                diag[i] = 1.0 + sigma * ((i == 0 || i + 1 == cols) ? 1.0 : 2.0);
                rhs[i] = g[(k * cols + i) * static_cast<std::size_t>(dim) +
                           static_cast<std::size_t>(c)];
            }
            for (std::size_t i = 1; i < cols; ++i) {
                double f = -sigma / diag[i - 1];
                diag[i] -= f * -sigma;
                rhs[i] -= f * rhs[i - 1];
            }
            rhs[cols - 1] /= diag[cols - 1];
            for (std::size_t i = cols - 1; i-- > 0;)
                rhs[i] = (rhs[i] + sigma * rhs[i + 1]) / diag[i];
            for (std::size_t i = 0; i < cols; ++i)
                d[(k * cols + i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] =
                    rhs[i];
        }
    }
}

inline CurvePath interpolation_path(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                    std::size_t n) {
    const std::size_t cols = c0.samples();
    std::vector<Vec3> grid((n + 1) * cols);
    for (std::size_t i = 0; i < cols; ++i) {
        ManifoldPoint p = c0.point(i);
        TangentVector full = curvematch::log(p, c1.point(i));
        grid[i] = c0[i];
        grid[n * cols + i] = c1[i];
        for (std::size_t k = 1; k < n; ++k) {
            TangentVector step = full;
            step.components *= static_cast<double>(k) / static_cast<double>(n);
            grid[k * cols + i] = curvematch::exp(p, step).coords;
        }
    }
    return CurvePath(c0.manifold(), n + 1, cols, std::move(grid));
}

}  // namespace detail

/// Geodesic boundary-value solve by path straightening: gradient descent
/// with backtracking on the discrete path energy, interior rows free,
/// endpoint rows fixed.
inline GeodesicResult geodesic_bvp(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                   const ElasticParams& params, const SolverConfig& config = {},
                                   const CurvePath* initial = nullptr) {
    params.validate();
    config.validate();
    if (c0.manifold() != c1.manifold())
        throw ContractViolation("geodesic_bvp needs curves on the same manifold");
    if (c0.samples() != c1.samples())
        throw ContractViolation("geodesic_bvp needs curves sampled on the same grid");

    const std::size_t n = static_cast<std::size_t>(config.n_steps);
    std::vector<Vec3> grid;
    if (initial != nullptr) {
        if (initial->manifold() != c0.manifold() || initial->cols() != c0.samples() ||
            initial->steps() != n)
            throw ContractViolation("warm-start path does not match the problem grid");
        grid = initial->flat();
        for (std::size_t i = 0; i < c0.samples(); ++i) {
            grid[i] = c0[i];
            grid[n * c0.samples() + i] = c1[i];
        }
    } else {
        grid = detail::interpolation_path(c0, c1, n).flat();
    }

    detail::PathEnergyEngine engine(c0.manifold(), n + 1, c0.samples(), std::move(grid), params);
    if (!std::isfinite(engine.energy()))
        throw DegenerateCurveError("initial path has degenerate rows");

    GeodesicResult res{CurvePath(c0.manifold(), n + 1, c0.samples(), engine.points()),
                       0.0, false, 0, std::numeric_limits<double>::infinity(), {}};
    res.energy_history.push_back(engine.energy());

    const double sigma = config.smoothing >= 0
                             ? config.smoothing
                             : static_cast<double>(c0.segments() * c0.segments()) / 16.0;
    const std::size_t nvar = (n - 1) * c0.samples() * static_cast<std::size_t>(engine.point_dim());

    // L-BFGS memory; the inverse-Hessian seed is the H1 smoother scaled by
    // the latest secant pair. Plain gradient steps stall in the long flat
    // valley of this energy, the quasi-Newton direction does not.
    constexpr std::size_t kMemory = 16;
    std::vector<std::vector<double>> mem_s, mem_y;
    std::vector<double> mem_rho;
    double gamma = 1.0;
    auto reset_memory = [&] {
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
        gamma = 1.0;
    };
    auto two_loop = [&](const std::vector<double>& g, std::vector<double>& d) {
        std::vector<double> q = g;
        std::vector<double> al(mem_s.size());
        for (std::size_t i = mem_s.size(); i-- > 0;) {
            double sq = 0;
            for (std::size_t j = 0; j < nvar; ++j) sq += mem_s[i][j] * q[j];
            al[i] = mem_rho[i] * sq;
            for (std::size_t j = 0; j < nvar; ++j) q[j] -= al[i] * mem_y[i][j];
        }
        detail::smooth_gradient_rows(q, d, n - 1, c0.samples(), engine.point_dim(), sigma);
        for (std::size_t j = 0; j < nvar; ++j) d[j] *= gamma;
        for (std::size_t i = 0; i < mem_s.size(); ++i) {
            double yd = 0;
            for (std::size_t j = 0; j < nvar; ++j) yd += mem_y[i][j] * d[j];
            double be = mem_rho[i] * yd;
            for (std::size_t j = 0; j < nvar; ++j) d[j] += (al[i] - be) * mem_s[i][j];
        }
    };

    std::vector<double> grad, dir, smoothed, grad_prev;
    double alpha_prev = config.step_size;
    int accepted = 0;
    bool fresh_gradient = false;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        if (!fresh_gradient) engine.gradient(grad, config.threads);
        fresh_gradient = false;
        detail::smooth_gradient_rows(grad, smoothed, n - 1, c0.samples(), engine.point_dim(),
                                     sigma);
        double gsg = 0;  // squared gradient norm in the smoothed metric
        for (std::size_t j = 0; j < nvar; ++j) gsg += grad[j] * smoothed[j];
        double gn = std::sqrt(std::max(0.0, gsg));
        res.final_gradient_norm = gn;
        if (gn <= config.gradient_tolerance) {
            res.converged = true;
            break;
        }
        two_loop(grad, dir);
        double gd = 0;  // directional derivative along -dir
        for (std::size_t j = 0; j < nvar; ++j) gd += grad[j] * dir[j];
        if (!(gd > 0)) {  // lost curvature; restart from the smoothed gradient
            reset_memory();
            dir = smoothed;
            gd = gsg;
            if (!(gd > 0)) break;
        }
        double alpha = mem_s.empty() ? std::min(alpha_prev * 2.0, 1e6) : 1.0;
        bool ok = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<Vec3> cand = engine.stepped(dir, alpha);
            double e = engine.energy_of(cand);
            if (std::isfinite(e) && e <= engine.energy() - 1e-4 * alpha * gd) {
                engine.adopt(std::move(cand));
                ok = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!ok) break;
        alpha_prev = alpha;
        ++accepted;
        res.energy_history.push_back(engine.energy());
        if (config.renorm_every > 0 && accepted % config.renorm_every == 0) {
            engine.renormalize_speed();
            reset_memory();
            continue;  // the path jumped; secant pair would be stale
        }
        // secant update: s = -alpha * dir, y = grad_new - grad_old
        grad_prev = std::move(grad);
        engine.gradient(grad, config.threads);
        fresh_gradient = true;
        double sy = 0, yy = 0;
        for (std::size_t j = 0; j < nvar; ++j) {
            double y = grad[j] - grad_prev[j];
            sy += -alpha * dir[j] * y;
            yy += y * y;
        }
        if (std::isfinite(sy) && std::isfinite(yy) && yy > 0 && sy > 1e-12 * std::sqrt(yy)) {
            std::vector<double> svec(nvar), yvec(nvar);
            for (std::size_t j = 0; j < nvar; ++j) {
                svec[j] = -alpha * dir[j];
                yvec[j] = grad[j] - grad_prev[j];
            }
            mem_s.push_back(std::move(svec));
            mem_y.push_back(std::move(yvec));
            mem_rho.push_back(1.0 / sy);
            gamma = sy / yy;
            if (mem_s.size() > kMemory) {
                mem_s.erase(mem_s.begin());
                mem_y.erase(mem_y.begin());
                mem_rho.erase(mem_rho.begin());
            }
        }
    }
    res.iterations = accepted;

    res.path = CurvePath(c0.manifold(), n + 1, c0.samples(), engine.points());
    res.length = path_length(res.path, params);
    return res;
}

/// Dispatch: flat SRV solve on the plane at (a,b) = (1, 1/2), path
/// straightening everywhere else.
inline GeodesicResult solve_geodesic(const DiscreteCurve& c0, const DiscreteCurve& c1,
                                     const ElasticParams& params, const SolverConfig& config = {},
                                     const CurvePath* initial = nullptr) {
    if (c0.manifold() == ManifoldId::Plane && std::abs(params.a - 1.0) < 1e-12 &&
        std::abs(params.b - 0.5) < 1e-12)
        return geodesic_plane(c0, c1, config);
    return geodesic_bvp(c0, c1, params, config, initial);
}

}  // namespace curvematch
