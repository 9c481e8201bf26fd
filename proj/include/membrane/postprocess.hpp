#pragma once

#include <string>
#include <utility>
#include <vector>

#include "membrane/element.hpp"
#include "membrane/geometry.hpp"
#include "membrane/mesh.hpp"

namespace membrane {

/// Stress state at one quadrature point.
struct StressSample {
    Vec3 position;
    Vec3 normal;
    Mat3 projected_strain;  ///< P eps P
    Mat3 stress;            ///< 2 mu P eps P + lambda tr(P eps P) P
    double weight;          ///< quadrature weight times surface measure
};

struct StressField {
    /// One entry per triangle, one sample per quadrature point.
    std::vector<std::vector<StressSample>> elements;

    /// Weighted mean stress of a triangle.
    Mat3 element_average(std::size_t triangle) const;
};

/// Projected stresses from nodal displacements `u` (3 per vertex, global).
StressField recover_stress(const SurfaceMesh& mesh, const MaterialModel& material,
                           const std::vector<double>& u, const QuadratureRule& quad,
                           NormalVariant variant = NormalVariant::interpolated);

/// sqrt(sum_q w_q |sigma_exact(x_q) - sigma_h(x_q)|_F^2) over the discrete surface.
double stress_l2_error(const StressField& field, const ExactSolution& exact);

struct ConvergenceRecord {
    std::vector<std::pair<double, double>> samples;  ///< (h, error)
    double slope = 0.0;
    /// Root-mean-square residual of the log-log fit.
    double fit_residual = 0.0;
};

/// Least-squares slope of log(error) against log(h). Needs at least three
/// samples with positive h and error.
ConvergenceRecord convergence_rate(std::vector<std::pair<double, double>> samples);

/// Columns h, error, rate; rate between consecutive rows, empty on row one.
void write_convergence_csv(const ConvergenceRecord& record, const std::string& path);

double von_mises(const Mat3& stress);

/// Legacy ASCII VTK unstructured grid with point displacements, cell stress
/// (xx yy zz xy yz xz) and cell von Mises stress.
void export_vtk(const SurfaceMesh& mesh, const std::vector<double>& u, const StressField& field,
                const std::string& path);

}  // namespace membrane
