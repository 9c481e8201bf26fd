#pragma once

#include <optional>
#include <string>
#include <vector>

#include "membrane/assembly.hpp"
#include "membrane/postprocess.hpp"
#include "membrane/solver.hpp"

namespace membrane {

enum class CaseKind { cylinder, torus, import };

/// Everything a run needs. Defaults are the benchmark parameters:
/// E = 100, nu = 1/2, t = 1e-2, F = 1 (cylinder r = 1, L = 4) and
/// p = 1 (torus R = 1, r = 1/2).
struct RunConfig {
    CaseKind kind = CaseKind::cylinder;
    double radius = 1.0;        ///< cylinder radius
    double length = 4.0;        ///< cylinder length
    double major_radius = 1.0;  ///< torus R
    double minor_radius = 0.5;  ///< torus r
    std::string mesh_path;      ///< import case

    double youngs_modulus = 100.0;
    double poisson_ratio = 0.5;
    double thickness = 1e-2;
    ElasticityMode mode = ElasticityMode::plane_stress;

    double force = 1.0;     ///< cylinder F
    double pressure = 1.0;  ///< torus / import p

    /// Resolution n: cylinder n_circ = n_axial = n; torus n_tor = 2n, n_pol = n.
    std::size_t n = 32;
    std::vector<std::size_t> resolutions{16, 32, 64, 128};

    NormalVariant variant = NormalVariant::interpolated;
    NormalMode normals = NormalMode::exact;
    int quadrature_order = 2;

    double tolerance = 1e-10;
    std::size_t max_iterations = 0;
    Preconditioner preconditioner = Preconditioner::block_jacobi;

    std::string output_dir = "out";
    bool write_vtk = true;

    /// Throws Error("cli", ...) for any parameter outside module preconditions.
    void validate() const;
    MaterialModel material() const;
};

const char* to_string(CaseKind kind);
CaseKind parse_case(const std::string& name);
NormalVariant parse_variant(const std::string& name);
ElasticityMode parse_mode(const std::string& name);
NormalMode parse_normal_mode(const std::string& name);
Preconditioner parse_preconditioner(const std::string& name);

/// Mesh, load, constraints and (for benchmarks) exact solution of one case.
struct Problem {
    SurfaceMesh mesh;
    MaterialModel material;
    LoadField load;
    std::vector<Constraint> constraints;
    std::optional<ExactSolution> exact;
    std::optional<AnalyticSurface> surface;
    bool closed_surface = false;
};

Problem build_problem(const RunConfig& config, std::size_t n);

struct CaseResult {
    std::size_t n = 0;
    double h = 0.0;
    std::size_t vertices = 0;
    std::size_t triangles = 0;
    std::optional<double> stress_error;
    SolveReport report;
    std::vector<double> displacement;
    StressField stress;
};

/// Mesh -> assemble -> constrain (open surfaces) -> solve -> recover stress.
/// Closed surfaces are solved with translation deflation.
CaseResult solve_case(const RunConfig& config, std::size_t n, const SolverOptions& solver_extra = {});

struct RunOutcome {
    CaseResult result;
    std::vector<std::string> artifacts;
};

/// Solves at config.n and writes <out>/report.txt (and <out>/solution.vtk).
RunOutcome run_case(const RunConfig& config);

struct ConvergenceOutcome {
    std::vector<CaseResult> results;
    ConvergenceRecord record;
    std::vector<std::string> artifacts;
};

/// Solves every resolution and writes <out>/convergence.csv and
/// <out>/report.txt. On a failed case the rows computed so far are flushed
/// before the error propagates.
ConvergenceOutcome run_convergence(const RunConfig& config);

}  // namespace membrane
