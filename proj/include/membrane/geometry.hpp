#pragma once

#include <functional>
#include <variant>

#include "membrane/types.hpp"

namespace membrane {

struct Cylinder {
    double radius;
    double length;
};

struct Torus {
    double major_radius;
    double minor_radius;
};

/// Closed-form benchmark surface.
///
/// The cylinder has its axis along x with ends at x = 0 and x = L; it is
/// treated as infinite for distance queries. The torus is symmetric about the
/// z-axis and parametrized by a toroidal angle phi and a poloidal angle theta:
///
///     x = (R + r sin(theta)) cos(phi)
///     y = (R + r sin(theta)) sin(phi)
///     z = r cos(theta)
///
/// so sin(theta) = +1 on the outer equator (farthest from the symmetry axis)
/// and -1 on the inner equator.
class AnalyticSurface {
public:
    static AnalyticSurface cylinder(double radius, double length);
    static AnalyticSurface torus(double major_radius, double minor_radius);

    const std::variant<Cylinder, Torus>& shape() const noexcept { return shape_; }
    bool is_cylinder() const noexcept { return std::holds_alternative<Cylinder>(shape_); }
    bool is_torus() const noexcept { return std::holds_alternative<Torus>(shape_); }
    const Cylinder& as_cylinder() const;
    const Torus& as_torus() const;

    /// Distance to the surface, positive outside. Throws on the torus axis.
    double signed_distance(const Vec3& x) const;

    /// Unit gradient of the signed distance; defined off the surface as well.
    Vec3 distance_gradient(const Vec3& x) const;

    /// Closest point on the surface.
    Vec3 closest_point(const Vec3& x) const;

    /// Outward unit normal at a point lying on the surface (within 1e-8).
    Vec3 normal_at(const Vec3& x) const;

    /// Characteristic length used to scale finite-difference steps.
    double characteristic_length() const;

private:
    explicit AnalyticSurface(std::variant<Cylinder, Torus> shape) : shape_(shape) {}

    std::variant<Cylinder, Torus> shape_;
};

/// P = I - n n^T. Throws if |n| differs from 1 by more than 1e-12.
Mat3 projector(const Vec3& n);

enum class ElasticityMode { plane_stress, plane_strain };

/// Isotropic material plus membrane thickness.
///
/// In plane stress the in-plane Lame parameter is lambda0 = E nu / (1 - nu^2),
/// which stays finite at nu = 1/2. Plane strain uses the 3D lambda.
class MaterialModel {
public:
    MaterialModel(double youngs_modulus, double poisson_ratio, double thickness,
                  ElasticityMode mode = ElasticityMode::plane_stress);

    double youngs_modulus() const noexcept { return e_; }
    double poisson_ratio() const noexcept { return nu_; }
    double thickness() const noexcept { return t_; }
    ElasticityMode mode() const noexcept { return mode_; }

    double mu() const noexcept { return e_ / (2.0 * (1.0 + nu_)); }
    double lambda() const;
    double lambda0() const noexcept { return e_ * nu_ / (1.0 - nu_ * nu_); }
    /// Coefficient multiplying tr(eps) P in the in-plane constitutive law.
    double membrane_lambda() const;

private:
    double e_;
    double nu_;
    double t_;
    ElasticityMode mode_;
};

/// Exact benchmark data. Both maps accept any point near the surface and
/// evaluate at its closest-point projection, so they can be sampled at
/// quadrature points of the flat facets.
struct ExactSolution {
    std::function<Mat3(const Vec3&)> stress_at;
    std::function<Vec3(const Vec3&)> load_at;
};

/// Cylinder pulled along +x by f(x) = F/(2 pi r) x/L^2 per unit area.
/// Axial stress F (1 - (x/L)^2) / (4 pi r t).
ExactSolution cylinder_exact(double force, const MaterialModel& material,
                             const AnalyticSurface& surface);

/// Torus under internal gauge pressure p (load p n). Principal stresses
/// pr/(2t) along the toroidal direction and
/// pr/t (1 - r sin(theta) / (2 (R + r sin(theta)))) along the poloidal one.
ExactSolution torus_exact(double pressure, const MaterialModel& material,
                          const AnalyticSurface& surface);

}  // namespace membrane
