#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "membrane/error.hpp"
#include "membrane/run.hpp"

using namespace membrane;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("membrane_run_test_" + name);
    fs::remove_all(dir);
    return dir.string();
}

double report_value(const std::string& report, const std::string& key) {
    const auto pos = report.find(key + ": ");
    REQUIRE(pos != std::string::npos);
    return std::stod(report.substr(pos + key.size() + 2));
}

}  // namespace

TEST_CASE("defaults are the benchmark parameters") {
    const RunConfig c;
    CHECK(c.radius == 1.0);
    CHECK(c.length == 4.0);
    CHECK(c.major_radius == 1.0);
    CHECK(c.minor_radius == 0.5);
    CHECK(c.youngs_modulus == 100.0);
    CHECK(c.poisson_ratio == 0.5);
    CHECK(c.thickness == 0.01);
    CHECK(c.force == 1.0);
    CHECK(c.pressure == 1.0);
    CHECK(c.mode == ElasticityMode::plane_stress);
    CHECK(c.tolerance == 1e-10);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("parsers") {
    CHECK(parse_case("torus") == CaseKind::torus);
    CHECK(parse_variant("facet") == NormalVariant::facet);
    CHECK(parse_mode("plane_strain") == ElasticityMode::plane_strain);
    CHECK(parse_normal_mode("averaged") == NormalMode::averaged);
    CHECK(parse_preconditioner("jacobi") == Preconditioner::jacobi);
    CHECK(std::string(to_string(CaseKind::import)) == "import");
    CHECK_THROWS_AS(parse_case("sphere"), Error);
    CHECK_THROWS_AS(parse_variant("curved"), Error);
    CHECK_THROWS_AS(parse_mode("plane"), Error);
    CHECK_THROWS_AS(parse_normal_mode("smooth"), Error);
    CHECK_THROWS_AS(parse_preconditioner("ilu"), Error);
}

TEST_CASE("validation errors are attributed to the cli") {
    RunConfig c;
    c.poisson_ratio = 1.0;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("cli:"), Error);
    CHECK_THROWS_AS(run_case(c), Error);
    c = RunConfig{};
    c.kind = CaseKind::torus;
    c.major_radius = 0.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.n = 2;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.quadrature_order = 3;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.kind = CaseKind::import;
    c.normals = NormalMode::averaged;
    CHECK_THROWS_AS(c.validate(), Error);
    c.mesh_path = "x.off";
    c.normals = NormalMode::exact;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("problem setup") {
    RunConfig c;
    const Problem cyl = build_problem(c, 8);
    CHECK(cyl.mesh.vertex_count() == 8 * 9);
    CHECK(cyl.constraints.size() == 16);
    CHECK(!cyl.closed_surface);
    CHECK(cyl.exact.has_value());

    c.kind = CaseKind::torus;
    const Problem tor = build_problem(c, 6);
    CHECK(tor.mesh.vertex_count() == 12 * 6);
    CHECK(tor.constraints.empty());
    CHECK(tor.closed_surface);
}

TEST_CASE("cylinder run writes a report and a VTK file") {
    RunConfig c;
    c.n = 8;
    c.output_dir = scratch("cyl");
    const RunOutcome out = run_case(c);
    REQUIRE(out.artifacts.size() == 2);
    for (const std::string& p : out.artifacts) CHECK(fs::exists(p));
    const std::string report = slurp(c.output_dir + "/report.txt");
    const double err = report_value(report, "stress_l2_error");
    CHECK(std::isfinite(err));
    CHECK(err > 0.0);
    CHECK(report_value(report, "relative_residual") <= c.tolerance);
    CHECK(report_value(report, "deflated_dimension") == 0.0);
    CHECK(slurp(c.output_dir + "/solution.vtk").rfind("# vtk DataFile Version 3.0", 0) == 0);

    c.write_vtk = false;
    c.output_dir = scratch("cyl_novtk");
    CHECK(run_case(c).artifacts.size() == 1);
    CHECK(!fs::exists(c.output_dir + "/solution.vtk"));
}

TEST_CASE("torus run takes the closed-surface path") {
    RunConfig c;
    c.kind = CaseKind::torus;
    c.n = 8;
    c.output_dir = scratch("torus");
    const RunOutcome out = run_case(c);
    CHECK(out.result.report.deflated_dimension == 3);
    CHECK(out.result.report.relative_residual <= 1e-10);
    const std::string report = slurp(c.output_dir + "/report.txt");
    CHECK(report_value(report, "deflated_dimension") == 3.0);
}

TEST_CASE("convergence study output is deterministic") {
    RunConfig c;
    c.resolutions = {4, 8, 16};
    c.output_dir = scratch("conv_a");
    const ConvergenceOutcome a = run_convergence(c);
    const std::string csv_a = slurp(c.output_dir + "/convergence.csv");
    c.output_dir = scratch("conv_b");
    run_convergence(c);
    CHECK(csv_a == slurp(c.output_dir + "/convergence.csv"));
    CHECK(a.results.size() == 3);
    CHECK(a.record.samples.size() == 3);
    CHECK(csv_a.rfind("h,error,rate\n", 0) == 0);
    for (const std::string& p : a.artifacts) CHECK(fs::exists(p));

    c.resolutions = {4, 8};
    CHECK_THROWS_AS(run_convergence(c), Error);
    c.resolutions = {4, 8, 16};
    c.kind = CaseKind::import;
    c.mesh_path = "mesh.off";
    c.normals = NormalMode::averaged;
    CHECK_THROWS_AS(run_convergence(c), Error);
}

TEST_CASE("failed convergence case flushes the rows computed so far") {
    RunConfig c;
    c.resolutions = {4, 32, 64};
    c.max_iterations = 25;
    c.output_dir = scratch("conv_fail");
    CHECK_THROWS_AS(run_convergence(c), SolverError);
    const std::string csv = slurp(c.output_dir + "/convergence.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("import case solves a clamped OFF mesh") {
    // Open cylinder patch written through the OFF format.
    const SurfaceMesh src = build_cylinder_mesh(1.0, 2.0, 12, 4);
    const std::string dir = scratch("import");
    fs::create_directories(dir);
    const std::string path = dir + "/patch.off";
    {
        std::ofstream out(path);
        out << "OFF\n" << src.vertex_count() << ' ' << src.triangle_count() << " 0\n";
        out.precision(17);
        for (const Vec3& v : src.vertices()) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
        for (const Triangle& t : src.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    RunConfig c;
    c.kind = CaseKind::import;
    c.mesh_path = path;
    c.normals = NormalMode::averaged;
    c.output_dir = dir + "/out";
    const RunOutcome out = run_case(c);
    CHECK(!out.result.stress_error.has_value());
    CHECK(out.result.report.relative_residual <= 1e-10);
    CHECK(out.result.vertices == src.vertex_count());
    // Clamped boundary nodes stay put.
    for (const auto& loop : src.boundary_components())
        for (std::size_t v : loop.vertices)
            for (int k = 0; k < 3; ++k) CHECK(out.result.displacement[3 * v + k] == 0.0);
}
