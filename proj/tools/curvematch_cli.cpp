// Command-line front end: geodesics, optimal matching, path decomposition,
// the reparameterization oracle, SVG plots, and test-curve generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvematch/curvematch.hpp"

namespace fs = std::filesystem;
using namespace curvematch;

namespace {

struct RunConfig {
    double a = 1.0;
    double b = 0.5;
    std::size_t samples = 100;   // N
    int steps = 10;              // path discretization in s
    double threshold = -1.0;     // <= 0: scale-relative default
    int max_iter = 500;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    ElasticParams elastic() const { return ElasticParams{a, b, 1e-12}; }
    SolverConfig solver() const {
        SolverConfig cfg;
        cfg.n_steps = steps;
        cfg.max_iterations = max_iter;
        return cfg;
    }
    void validate() const {
        if (samples < 8) throw ContractViolation("--samples must be at least 8");
        if (!(a > 0) || !(b > 0)) throw ContractViolation("--a and --b must be positive");
        if (steps < 2) throw ContractViolation("--steps must be at least 2");
    }
};

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--a", cfg.a, "normal coefficient of the elastic metric")->capture_default_str();
    cmd->add_option("--b", cfg.b, "tangential coefficient of the elastic metric")->capture_default_str();
    cmd->add_option("--samples", cfg.samples, "curve samples N")->capture_default_str();
    cmd->add_option("--steps", cfg.steps, "path steps in s")->capture_default_str();
    cmd->add_option("--threshold", cfg.threshold, "matching gap threshold (default: 1e-3 x curve length)");
    cmd->add_option("--max-iter", cfg.max_iter, "solver iteration cap")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    cmd->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
}

DiscreteCurve load_resampled(const std::string& file, std::size_t N) {
    DiscreteCurve c = read_curve_file(file).curve;
    if (c.segments() != N) c = reparameterize(c, Diffeo::identity(N));
    return c;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void write_text(const std::string& file, const std::string& content) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write " + file);
    out << content;
}

int cmd_geodesic(const RunConfig& cfg, const std::string& f0, const std::string& f1) {
    cfg.validate();
    DiscreteCurve c0 = load_resampled(f0, cfg.samples);
    DiscreteCurve c1 = load_resampled(f1, cfg.samples);
    if (c0.manifold() != c1.manifold())
        throw ContractViolation("input curves live on different manifolds");
    GeodesicResult geo = solve_geodesic(c0, c1, cfg.elastic(), cfg.solver());
    if (!geo.converged) throw NonConvergenceError("geodesic solve did not converge");
    write_path_file(out_path(cfg, "path.txt"), geo.path);
    write_text(out_path(cfg, "length.txt"), detail::fmt_double(geo.length) + "\n");
    std::cout << "length " << detail::fmt_double(geo.length) << "\n";
    return 0;
}

int cmd_match(const RunConfig& cfg, const std::string& f0, const std::string& f1,
              const std::string& label) {
    cfg.validate();
    DiscreteCurve c0 = load_resampled(f0, cfg.samples);
    DiscreteCurve c1 = load_resampled(f1, cfg.samples);
    if (c0.manifold() != c1.manifold())
        throw ContractViolation("input curves live on different manifolds");
    MatchResult res = [&] {
        try {
            return optimal_match(c0, c1, cfg.elastic(), cfg.solver(), cfg.threshold);
        } catch (const DivergenceError& e) {
            write_scalar_series_file(out_path(cfg, "gap_history.txt"), "gaps", e.gap_history);
            throw;
        }
    }();
    double blue = res.length_history.front();
    double red = res.length_history.back();
    write_curve_file(out_path(cfg, "matched.txt"), res.matched_target, "matched target");
    write_diffeo_file(out_path(cfg, "total_diffeo.txt"), res.total_diffeo);
    write_path_file(out_path(cfg, "horizontal_path.txt"), res.final_geodesic.path);
    write_lengths_csv(out_path(cfg, "lengths.csv"), {{label, blue, red}});
    write_scalar_series_file(out_path(cfg, "gap_history.txt"), "gaps", res.gap_history);
    std::cout << "parameterized " << detail::fmt_double(blue) << "\n";
    std::cout << "horizontal " << detail::fmt_double(red) << "\n";
    return 0;
}

int cmd_decompose(const RunConfig& cfg, const std::string& pathfile) {
    CurvePath path = read_path_file(pathfile);
    PathDecomposition dec = horizontal_part(path, cfg.elastic());
    write_path_file(out_path(cfg, "horizontal.txt"), dec.horizontal_path);
    std::vector<std::vector<double>> dgrid;
    for (const auto& d : dec.diffeos) dgrid.push_back(d.values());
    write_scalar_grid_file(out_path(cfg, "diffeos.txt"), dgrid);
    write_scalar_grid_file(out_path(cfg, "m_field.txt"), dec.m_field);
    if (dec.repair_warning)
        std::cerr << "warning: monotonicity repair touched "
                  << static_cast<int>(dec.max_repair_fraction * 100) << "% of nodes\n";
    return 0;
}

int cmd_oracle(const RunConfig& cfg, const std::string& f0, const std::string& f1,
               std::size_t grid) {
    cfg.validate();
    DiscreteCurve c0 = load_resampled(f0, cfg.samples);
    DiscreteCurve c1 = load_resampled(f1, cfg.samples);
    OracleResult res = dp_reparam_oracle(c0, c1, cfg.elastic(), grid);
    write_diffeo_file(out_path(cfg, "oracle_phi.txt"), res.phi);
    write_text(out_path(cfg, "oracle_distance.txt"), detail::fmt_double(res.distance) + "\n");
    std::cout << "distance " << detail::fmt_double(res.distance) << "\n";
    return 0;
}

int cmd_plot(const std::vector<std::string>& files, const std::string& outfile) {
    std::vector<CurvePath> paths;
    for (const auto& f : files) paths.push_back(read_path_file(f));
    write_text(outfile, render_svg(paths));
    return 0;
}

int cmd_gen(const RunConfig& cfg, const std::string& family, int variant) {
    cfg.validate();
    GeneratedPair pair = generate_pair(family_from_name(family), cfg.seed, cfg.samples, variant);
    write_curve_file(out_path(cfg, "c0.txt"), pair.c0, family + " source");
    write_curve_file(out_path(cfg, "c1.txt"), pair.c1, family + " target");
    std::cout << "wrote " << out_path(cfg, "c0.txt") << " and " << out_path(cfg, "c1.txt") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastic geodesics and optimal matching between curves in the plane, "
                 "the hyperbolic half-plane and the sphere"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string f0, f1, label = "pair", family = "segments", plot_out = "plot.svg";
    std::vector<std::string> plot_files;
    std::size_t oracle_grid = 100;
    int variant = 0;

    auto* geodesic_cmd = app.add_subcommand("geodesic", "geodesic between two parameterized curves");
    geodesic_cmd->add_option("c0", f0, "source curve file")->required();
    geodesic_cmd->add_option("c1", f1, "target curve file")->required();
    add_common(geodesic_cmd, cfg);

    auto* match_cmd = app.add_subcommand("match", "optimal matching between two curves");
    match_cmd->add_option("c0", f0, "source curve file")->required();
    match_cmd->add_option("c1", f1, "target curve file")->required();
    match_cmd->add_option("--label", label, "row label for lengths.csv")->capture_default_str();
    add_common(match_cmd, cfg);

    auto* dec_cmd = app.add_subcommand("decompose", "horizontal part of a path of curves");
    dec_cmd->add_option("path", f0, "path grid file")->required();
    add_common(dec_cmd, cfg);

    auto* oracle_cmd = app.add_subcommand("oracle", "dynamic-programming reparameterization oracle");
    oracle_cmd->add_option("c0", f0, "source curve file (plane)")->required();
    oracle_cmd->add_option("c1", f1, "target curve file (plane)")->required();
    oracle_cmd->add_option("--grid", oracle_grid, "oracle lattice size")->capture_default_str();
    add_common(oracle_cmd, cfg);

    auto* plot_cmd = app.add_subcommand("plot", "render path grids as an SVG figure");
    plot_cmd->add_option("paths", plot_files, "path grid files")->required()->expected(-1);
    plot_cmd->add_option("--out", plot_out, "output SVG file")->capture_default_str();

    auto* gen_cmd = app.add_subcommand("gen", "generate a seeded pair of test curves");
    gen_cmd->add_option("--family", family, "spiral|sshape|segments|arcs")->capture_default_str();
    gen_cmd->add_option("--variant", variant, "parameterization variant 0..4")->capture_default_str();
    add_common(gen_cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (geodesic_cmd->parsed()) return cmd_geodesic(cfg, f0, f1);
        if (match_cmd->parsed()) return cmd_match(cfg, f0, f1, label);
        if (dec_cmd->parsed()) return cmd_decompose(cfg, f0);
        if (oracle_cmd->parsed()) return cmd_oracle(cfg, f0, f1, oracle_grid);
        if (plot_cmd->parsed()) return cmd_plot(plot_files, plot_out);
        if (gen_cmd->parsed()) return cmd_gen(cfg, family, variant);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateCurveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
