#include "membrane/run.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "membrane/error.hpp"
#include "membrane/mesh_io.hpp"

namespace membrane {

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error("cli", message); }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_report(const std::string& path, const RunConfig& config,
                  const std::vector<CaseResult>& results, const ConvergenceRecord* record) {
    std::ofstream out(path);
    if (!out) throw Error("cli", "cannot open " + path + " for writing");
    const MaterialModel material = config.material();
    out << "case: " << to_string(config.kind) << '\n';
    out << "E: " << format_double(material.youngs_modulus()) << '\n';
    out << "nu: " << format_double(material.poisson_ratio()) << '\n';
    out << "t: " << format_double(material.thickness()) << '\n';
    out << "mode: " << (material.mode() == ElasticityMode::plane_stress ? "plane_stress" : "plane_strain")
        << '\n';
    out << "variant: " << (config.variant == NormalVariant::interpolated ? "interpolated" : "facet")
        << '\n';
    for (const CaseResult& r : results) {
        out << "\n[n=" << r.n << "]\n";
        out << "vertices: " << r.vertices << '\n';
        out << "triangles: " << r.triangles << '\n';
        out << "h: " << format_double(r.h) << '\n';
        if (r.stress_error) out << "stress_l2_error: " << format_double(*r.stress_error) << '\n';
        out << "iterations: " << r.report.iterations << '\n';
        out << "relative_residual: " << format_double(r.report.relative_residual) << '\n';
        out << "deflated_dimension: " << r.report.deflated_dimension << '\n';
        out << "rotation_drift: " << format_double(r.report.rotation_drift) << '\n';
    }
    if (record != nullptr) {
        out << "\nslope: " << format_double(record->slope) << '\n';
        out << "fit_residual: " << format_double(record->fit_residual) << '\n';
    }
    if (!out) throw Error("cli", "write failed for " + path);
}

std::string output_path(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.output_dir);
    return (std::filesystem::path(config.output_dir) / name).string();
}

}  // namespace

const char* to_string(CaseKind kind) {
    switch (kind) {
        case CaseKind::cylinder: return "cylinder";
        case CaseKind::torus: return "torus";
        case CaseKind::import: return "import";
    }
    return "?";
}

CaseKind parse_case(const std::string& name) {
    if (name == "cylinder") return CaseKind::cylinder;
    if (name == "torus") return CaseKind::torus;
    if (name == "import") return CaseKind::import;
    invalid("unknown case '" + name + "'");
}

NormalVariant parse_variant(const std::string& name) {
    if (name == "interpolated") return NormalVariant::interpolated;
    if (name == "facet") return NormalVariant::facet;
    invalid("unknown variant '" + name + "'");
}

ElasticityMode parse_mode(const std::string& name) {
    if (name == "plane_stress") return ElasticityMode::plane_stress;
    if (name == "plane_strain") return ElasticityMode::plane_strain;
    invalid("unknown mode '" + name + "'");
}

NormalMode parse_normal_mode(const std::string& name) {
    if (name == "exact") return NormalMode::exact;
    if (name == "averaged") return NormalMode::averaged;
    invalid("unknown normal mode '" + name + "'");
}

Preconditioner parse_preconditioner(const std::string& name) {
    if (name == "jacobi") return Preconditioner::jacobi;
    if (name == "block_jacobi") return Preconditioner::block_jacobi;
    invalid("unknown preconditioner '" + name + "'");
}

MaterialModel RunConfig::material() const {
    try {
        return MaterialModel(youngs_modulus, poisson_ratio, thickness, mode);
    } catch (const Error& e) {
        invalid(e.what());
    }
}

void RunConfig::validate() const {
    material();
    switch (kind) {
        case CaseKind::cylinder:
            if (!(radius > 0.0) || !(length > 0.0)) invalid("cylinder needs r > 0 and L > 0");
            break;
        case CaseKind::torus:
            if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
                invalid("torus needs R > r > 0");
            }
            break;
        case CaseKind::import:
            if (mesh_path.empty()) invalid("import case needs a mesh path");
            if (normals == NormalMode::exact) invalid("imported meshes support averaged normals only");
            break;
    }
    if (kind != CaseKind::import && n < 3) invalid("resolution n must be at least 3");
    if (quadrature_order != 1 && quadrature_order != 2) invalid("quadrature order must be 1 or 2");
    if (!(tolerance > 0.0)) invalid("solver tolerance must be positive");
}

Problem build_problem(const RunConfig& config, std::size_t n) {
    config.validate();
    const MaterialModel material = config.material();
    switch (config.kind) {
        case CaseKind::cylinder: {
            const AnalyticSurface surface = AnalyticSurface::cylinder(config.radius, config.length);
            SurfaceMesh mesh = build_cylinder_mesh(config.radius, config.length, n, n);
            if (config.normals == NormalMode::averaged) {
                mesh = compute_nodal_normals(mesh, NormalMode::averaged);
            }
            ExactSolution exact = cylinder_exact(config.force, material, surface);
            LoadField load = [f = exact.load_at](const Vec3& x, const Vec3&) { return f(x); };
            std::vector<Constraint> constraints = cylinder_constraints(mesh);
            return Problem{std::move(mesh), material,  std::move(load), std::move(constraints),
                           std::move(exact), surface, false};
        }
        case CaseKind::torus: {
            const AnalyticSurface surface =
                AnalyticSurface::torus(config.major_radius, config.minor_radius);
            SurfaceMesh mesh = build_torus_mesh(config.major_radius, config.minor_radius, 2 * n, n);
            if (config.normals == NormalMode::averaged) {
                mesh = compute_nodal_normals(mesh, NormalMode::averaged);
            }
            ExactSolution exact = torus_exact(config.pressure, material, surface);
            LoadField load = [f = exact.load_at](const Vec3& x, const Vec3&) { return f(x); };
            return Problem{std::move(mesh), material, std::move(load), {}, std::move(exact),
                           surface, true};
        }
        case CaseKind::import: {
            SurfaceMesh mesh = import_mesh(config.mesh_path, mesh_format_from_path(config.mesh_path));
            // Pressure along the local normal; open boundaries are clamped.
            LoadField load = [p = config.pressure](const Vec3&, const Vec3& normal) {
                return Vec3(p * normal);
            };
            std::vector<Constraint> constraints;
            for (const BoundaryComponent& loop : mesh.boundary_components()) {
                for (std::size_t v : loop.vertices) {
                    for (int c = 0; c < 3; ++c) constraints.push_back({v, Vec3::Unit(c)});
                }
            }
            const bool closed = mesh.boundary_components().empty();
            return Problem{std::move(mesh), material, std::move(load), std::move(constraints),
                           std::nullopt, std::nullopt, closed};
        }
    }
    invalid("unknown case");
}

CaseResult solve_case(const RunConfig& config, std::size_t n, const SolverOptions& solver_extra) {
    const Problem problem = build_problem(config, n);
    const QuadratureRule quad = quadrature_rule(config.quadrature_order);

    LinearSystem system = assemble(problem.mesh, problem.material, problem.load, quad, config.variant);
    system = apply_constraints(std::move(system), problem.constraints);

    SolverOptions options = solver_extra;
    options.tolerance = config.tolerance;
    options.max_iterations = config.max_iterations;
    options.preconditioner = config.preconditioner;
    options.deflate_translations = options.deflate_translations || problem.closed_surface;
    const SolveResult solution = solve(system, options);

    CaseResult result;
    result.n = n;
    result.h = mesh_size(problem.mesh);
    result.vertices = problem.mesh.vertex_count();
    result.triangles = problem.mesh.triangle_count();
    result.report = solution.report;
    result.displacement = solution.displacement;
    result.stress = recover_stress(problem.mesh, problem.material, result.displacement, quad,
                                   config.variant);
    if (problem.exact) result.stress_error = stress_l2_error(result.stress, *problem.exact);
    return result;
}

RunOutcome run_case(const RunConfig& config) {
    config.validate();
    RunOutcome outcome;
    outcome.result = solve_case(config, config.n);
    if (config.write_vtk) {
        const std::string vtk = output_path(config, "solution.vtk");
        const Problem problem = build_problem(config, config.n);
        export_vtk(problem.mesh, outcome.result.displacement, outcome.result.stress, vtk);
        outcome.artifacts.push_back(vtk);
    }
    const std::string report = output_path(config, "report.txt");
    write_report(report, config, {outcome.result}, nullptr);
    outcome.artifacts.push_back(report);
    return outcome;
}

ConvergenceOutcome run_convergence(const RunConfig& config) {
    config.validate();
    if (config.kind == CaseKind::import) invalid("convergence studies need a benchmark case");
    if (config.resolutions.size() < 3) invalid("convergence studies need at least 3 resolutions");

    ConvergenceOutcome outcome;
    const std::string csv = output_path(config, "convergence.csv");
    ConvergenceRecord partial;
    for (std::size_t n : config.resolutions) {
        try {
            outcome.results.push_back(solve_case(config, n));
        } catch (...) {
            write_convergence_csv(partial, csv);
            throw;
        }
        partial.samples.emplace_back(outcome.results.back().h, *outcome.results.back().stress_error);
    }
    outcome.record = convergence_rate(partial.samples);
    write_convergence_csv(outcome.record, csv);
    outcome.artifacts.push_back(csv);
    const std::string report = output_path(config, "report.txt");
    write_report(report, config, outcome.results, &outcome.record);
    outcome.artifacts.push_back(report);
    return outcome;
}

}  // namespace membrane
