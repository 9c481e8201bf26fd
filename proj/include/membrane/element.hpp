#pragma once

#include <array>
#include <functional>
#include <vector>

#include "membrane/geometry.hpp"
#include "membrane/types.hpp"

namespace membrane {

using Vec2 = Eigen::Vector2d;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

struct QuadraturePoint {
    double xi;
    double eta;
    double weight;
};

/// Rule on the reference triangle {xi >= 0, eta >= 0, xi + eta <= 1}.
/// Weights sum to 1/2.
struct QuadratureRule {
    std::vector<QuadraturePoint> points;
};

/// Order 1: centroid. Order 2: three interior points, weights 1/6.
QuadratureRule quadrature_rule(int order);

struct ShapeFunctions {
    std::array<double, 3> values;
    std::array<Vec2, 3> ref_gradients;
};

/// Linear shape functions (1 - xi - eta, xi, eta).
ShapeFunctions shape_values_and_ref_gradients(double xi, double eta);

/// Which normal forms the third row of the element Jacobian.
enum class NormalVariant {
    interpolated,  ///< normalized linear interpolation of the nodal normals
    facet,         ///< constant facet normal of the flat triangle
};

struct ElementNodes {
    std::array<Vec3, 3> coords;
    std::array<Vec3, 3> normals;
};

/// Rows: dx/dxi, dx/deta (constant over the flat facet) and the normal n^h.
Mat3 element_jacobian(const ElementNodes& nodes, double xi, double eta, NormalVariant variant);

/// Solves J g_i = (dphi_i/dxi, dphi_i/deta, 0). The results are orthogonal to
/// the third row of J and sum to zero.
std::array<Vec3, 3> basis_surface_gradients(const Mat3& jacobian,
                                            const std::array<Vec2, 3>& ref_gradients);

/// Symmetric tangential strain eps(u) = sym(grad_S u) produced by a unit
/// displacement of dof 3*node + component.
using StrainOperators = std::array<Mat3, 9>;
StrainOperators strain_displacement(const std::array<Vec3, 3>& gradients);

/// Tangential strain of the nodal displacement field `u` (9 values).
Mat3 tangential_strain(const std::array<Vec3, 3>& gradients, const Vec9& u);

/// Bilinear membrane energy density of two strains:
///   2 mu eps_u : eps_v - 4 mu (eps_u n).(eps_v n) + lambda tr(eps_u) tr(eps_v)
/// which equals 2 mu P eps_u P : P eps_v P + lambda tr tr when n.eps.n = 0.
double membrane_energy_density(const Mat3& eps_u, const Mat3& eps_v, const Vec3& normal,
                               double mu, double lambda);

/// Kinematics at one quadrature point of an element.
struct ElementPoint {
    Vec3 position;                  ///< mapped point on the flat facet
    Vec3 normal;                    ///< n^h (or facet normal)
    std::array<double, 3> shape;    ///< shape function values
    std::array<Vec3, 3> gradients;  ///< tangential basis gradients
    double measure;                 ///< quadrature weight times facet area scaling
};

std::vector<ElementPoint> element_points(const ElementNodes& nodes, const QuadratureRule& quad,
                                         NormalVariant variant);

/// t * integral over the facet of the membrane energy density, 9x9 with dof
/// order 3*node + component.
Mat9 element_stiffness(const ElementNodes& nodes, const MaterialModel& material,
                       const QuadratureRule& quad, NormalVariant variant);

/// Surface load density evaluated at a facet point with the local normal n^h.
using LoadField = std::function<Vec3(const Vec3& point, const Vec3& normal)>;

/// Consistent nodal loads: integral of f phi_i over the facet.
Vec9 element_load(const ElementNodes& nodes, const LoadField& load, const QuadratureRule& quad,
                  NormalVariant variant = NormalVariant::interpolated);

}  // namespace membrane
