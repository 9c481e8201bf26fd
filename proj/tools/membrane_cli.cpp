// membrane: command-line driver for the membrane shell solver.
//
//   membrane run --case cylinder --n 32 --out out/
//   membrane convergence --case torus --resolutions 16,32,64,128
//   membrane mesh-info --case import --mesh part.off

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "membrane/error.hpp"
#include "membrane/mesh_io.hpp"
#include "membrane/run.hpp"

namespace {

struct Flags {
    std::string kind = "cylinder";
    std::string variant = "interpolated";
    std::string mode = "plane_stress";
    std::string normals = "exact";
    std::string precond = "block_jacobi";
};

void add_common(CLI::App& app, membrane::RunConfig& config, Flags& flags) {
    app.add_option("--case", flags.kind, "cylinder | torus | import")->capture_default_str();
    app.add_option("--n", config.n, "resolution")->capture_default_str();
    app.add_option("--mesh", config.mesh_path, "OFF/OBJ file for --case import");
    app.add_option("--variant", flags.variant, "interpolated | facet")->capture_default_str();
    app.add_option("--normals", flags.normals, "exact | averaged")->capture_default_str();
    app.add_option("--E", config.youngs_modulus, "Young's modulus")->capture_default_str();
    app.add_option("--nu", config.poisson_ratio, "Poisson's ratio")->capture_default_str();
    app.add_option("--t", config.thickness, "thickness")->capture_default_str();
    app.add_option("--mode", flags.mode, "plane_stress | plane_strain")->capture_default_str();
    app.add_option("--F", config.force, "cylinder force scale")->capture_default_str();
    app.add_option("--p", config.pressure, "pressure")->capture_default_str();
    app.add_option("--r", config.radius, "cylinder radius")->capture_default_str();
    app.add_option("--L", config.length, "cylinder length")->capture_default_str();
    app.add_option("--R", config.major_radius, "torus major radius")->capture_default_str();
    app.add_option("--r-minor", config.minor_radius, "torus minor radius")->capture_default_str();
    app.add_option("--quad", config.quadrature_order, "quadrature order (1 or 2)")
        ->capture_default_str();
    app.add_option("--tol", config.tolerance, "relative residual tolerance")->capture_default_str();
    app.add_option("--max-iter", config.max_iterations, "CG iteration cap (0: 50 sqrt(ndof))")
        ->capture_default_str();
    app.add_option("--precond", flags.precond, "block_jacobi | jacobi")->capture_default_str();
    app.add_option("--out", config.output_dir, "output directory")->capture_default_str();
}

void finalize(membrane::RunConfig& config, const Flags& flags) {
    config.kind = membrane::parse_case(flags.kind);
    config.variant = membrane::parse_variant(flags.variant);
    config.mode = membrane::parse_mode(flags.mode);
    config.normals = membrane::parse_normal_mode(flags.normals);
    config.preconditioner = membrane::parse_preconditioner(flags.precond);
    if (config.kind == membrane::CaseKind::import && flags.normals == "exact") {
        config.normals = membrane::NormalMode::averaged;
    }
    config.validate();
}

void print_result(const membrane::CaseResult& r) {
    std::printf("n=%zu vertices=%zu triangles=%zu h=%.6g iterations=%zu residual=%.3e",
                r.n, r.vertices, r.triangles, r.h, r.report.iterations,
                r.report.relative_residual);
    if (r.stress_error) std::printf(" stress_l2_error=%.6e", *r.stress_error);
    std::printf("\n");
}

int mesh_info(const membrane::RunConfig& config) {
    const membrane::Problem problem = membrane::build_problem(config, config.n);
    const membrane::SurfaceMesh& mesh = problem.mesh;
    const long long chi = static_cast<long long>(mesh.vertex_count()) -
                          static_cast<long long>(mesh.edge_count()) +
                          static_cast<long long>(mesh.triangle_count());
    std::printf("vertices: %zu\n", mesh.vertex_count());
    std::printf("edges: %zu\n", mesh.edge_count());
    std::printf("triangles: %zu\n", mesh.triangle_count());
    std::printf("euler_characteristic: %lld\n", chi);
    std::printf("boundary_components: %zu\n", mesh.boundary_components().size());
    for (const auto& loop : mesh.boundary_components()) {
        std::printf("  %s: %zu vertices\n", loop.label.c_str(), loop.vertices.size());
    }
    std::printf("h: %.17g\n", membrane::mesh_size(mesh));
    std::printf("area: %.17g\n", mesh.total_area());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Membrane shell finite element solver"};
    app.require_subcommand(1);

    membrane::RunConfig config;
    Flags flags;

    // Options live on the top-level app so a plain key=value config file can
    // set them; subcommands fall through to it.
    app.set_config("--config", "", "key=value configuration file (flags override it)");
    add_common(app, config, flags);
    app.add_flag("!--no-vtk", config.write_vtk, "skip solution.vtk (run)");
    app.add_option("--resolutions", config.resolutions, "resolution ladder (convergence)")
        ->delimiter(',')
        ->capture_default_str();

    CLI::App* run = app.add_subcommand("run", "solve one case and write VTK + report");
    CLI::App* convergence = app.add_subcommand("convergence", "refinement study with slope fit");
    CLI::App* info = app.add_subcommand("mesh-info", "print mesh statistics");
    for (CLI::App* sub : {run, convergence, info}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        finalize(config, flags);
        if (info->parsed()) return mesh_info(config);

        if (run->parsed()) {
            const membrane::RunOutcome outcome = membrane::run_case(config);
            print_result(outcome.result);
            for (const std::string& path : outcome.artifacts) std::printf("wrote %s\n", path.c_str());
            return 0;
        }

        const membrane::ConvergenceOutcome outcome = membrane::run_convergence(config);
        for (const auto& r : outcome.results) print_result(r);
        std::printf("slope: %.6f (fit residual %.3e)\n", outcome.record.slope,
                    outcome.record.fit_residual);
        for (const std::string& path : outcome.artifacts) std::printf("wrote %s\n", path.c_str());
        return 0;
    } catch (const membrane::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
