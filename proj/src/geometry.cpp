#include "membrane/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "membrane/error.hpp"

namespace membrane {

namespace {

constexpr double kOnSurfaceTolerance = 1e-8;

// Poloidal frame of a torus point: (cos phi, sin phi) of the meridian plane
// and (sin theta, cos theta) of the tube cross-section.
struct TorusAngles {
    double cos_phi, sin_phi, sin_theta, cos_theta;
};

TorusAngles torus_angles(const Torus& torus, const Vec3& x) {
    const double rho = std::hypot(x.x(), x.y());
    if (rho < 1e-14 * torus.major_radius) {
        throw Error("geometry", "torus projection undefined on the symmetry axis");
    }
    const double dr = rho - torus.major_radius;
    const double tube = std::hypot(dr, x.z());
    if (tube < 1e-14 * torus.minor_radius) {
        throw Error("geometry", "torus projection undefined on the tube centerline");
    }
    return {x.x() / rho, x.y() / rho, dr / tube, x.z() / tube};
}

}  // namespace

AnalyticSurface AnalyticSurface::cylinder(double radius, double length) {
    if (!(radius > 0.0) || !(length > 0.0)) {
        throw Error("geometry", "cylinder requires r > 0 and L > 0");
    }
    return AnalyticSurface(Cylinder{radius, length});
}

AnalyticSurface AnalyticSurface::torus(double major_radius, double minor_radius) {
    if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
        throw Error("geometry", "torus requires R > r > 0");
    }
    return AnalyticSurface(Torus{major_radius, minor_radius});
}

const Cylinder& AnalyticSurface::as_cylinder() const {
    if (!is_cylinder()) throw Error("geometry", "surface is not a cylinder");
    return std::get<Cylinder>(shape_);
}

const Torus& AnalyticSurface::as_torus() const {
    if (!is_torus()) throw Error("geometry", "surface is not a torus");
    return std::get<Torus>(shape_);
}

double AnalyticSurface::characteristic_length() const {
    if (is_cylinder()) return as_cylinder().radius;
    return as_torus().minor_radius;
}

double AnalyticSurface::signed_distance(const Vec3& x) const {
    if (is_cylinder()) {
        return std::hypot(x.y(), x.z()) - as_cylinder().radius;
    }
    const Torus& torus = as_torus();
    const double rho = std::hypot(x.x(), x.y());
    if (rho < 1e-14 * torus.major_radius) {
        throw Error("geometry", "torus signed distance undefined on the symmetry axis");
    }
    return std::hypot(rho - torus.major_radius, x.z()) - torus.minor_radius;
}

Vec3 AnalyticSurface::distance_gradient(const Vec3& x) const {
    if (is_cylinder()) {
        const double rho = std::hypot(x.y(), x.z());
        if (rho == 0.0) throw Error("geometry", "cylinder normal undefined on the axis");
        return {0.0, x.y() / rho, x.z() / rho};
    }
    const TorusAngles a = torus_angles(as_torus(), x);
    return {a.sin_theta * a.cos_phi, a.sin_theta * a.sin_phi, a.cos_theta};
}

Vec3 AnalyticSurface::closest_point(const Vec3& x) const {
    return x - signed_distance(x) * distance_gradient(x);
}

Vec3 AnalyticSurface::normal_at(const Vec3& x) const {
    const double d = signed_distance(x);
    if (std::abs(d) > kOnSurfaceTolerance * std::max(1.0, characteristic_length())) {
        std::ostringstream msg;
        msg << "point lies " << d << " off the surface";
        throw Error("geometry", msg.str());
    }
    return distance_gradient(x);
}

Mat3 projector(const Vec3& n) {
    if (std::abs(n.norm() - 1.0) > 1e-12) {
        throw Error("geometry", "projector requires a unit normal");
    }
    return Mat3::Identity() - n * n.transpose();
}

MaterialModel::MaterialModel(double youngs_modulus, double poisson_ratio, double thickness,
                             ElasticityMode mode)
    : e_(youngs_modulus), nu_(poisson_ratio), t_(thickness), mode_(mode) {
    if (!(e_ > 0.0)) throw Error("geometry", "Young's modulus must be positive");
    if (!(t_ > 0.0)) throw Error("geometry", "thickness must be positive");
    const double upper = mode_ == ElasticityMode::plane_stress ? 1.0 : 0.5;
    if (!(nu_ > -1.0) || !(nu_ < upper)) {
        std::ostringstream msg;
        msg << "Poisson's ratio " << nu_ << " outside (-1, " << upper << ") for "
            << (mode_ == ElasticityMode::plane_stress ? "plane stress" : "plane strain");
        throw Error("geometry", msg.str());
    }
}

double MaterialModel::lambda() const {
    if (nu_ >= 0.5) throw Error("geometry", "3D lambda is unbounded for nu >= 1/2");
    return e_ * nu_ / ((1.0 + nu_) * (1.0 - 2.0 * nu_));
}

double MaterialModel::membrane_lambda() const {
    return mode_ == ElasticityMode::plane_stress ? lambda0() : lambda();
}

ExactSolution cylinder_exact(double force, const MaterialModel& material,
                             const AnalyticSurface& surface) {
    const Cylinder cyl = surface.as_cylinder();
    const double t = material.thickness();
    ExactSolution exact;
    exact.load_at = [force, cyl](const Vec3& x) -> Vec3 {
        const double f = force / (2.0 * std::numbers::pi * cyl.radius) * x.x() /
                         (cyl.length * cyl.length);
        return {f, 0.0, 0.0};
    };
    exact.stress_at = [force, cyl, t](const Vec3& x) -> Mat3 {
        const double s = x.x() / cyl.length;
        const double sigma = force * (1.0 - s * s) / (4.0 * std::numbers::pi * cyl.radius * t);
        Mat3 m = Mat3::Zero();
        m(0, 0) = sigma;
        return m;
    };
    return exact;
}

ExactSolution torus_exact(double pressure, const MaterialModel& material,
                          const AnalyticSurface& surface) {
    const Torus torus = surface.as_torus();
    const double t = material.thickness();
    ExactSolution exact;
    exact.load_at = [pressure, surface](const Vec3& x) -> Vec3 {
        return pressure * surface.distance_gradient(x);
    };
    exact.stress_at = [pressure, torus, t](const Vec3& x) -> Mat3 {
        const TorusAngles a = torus_angles(torus, x);
        const double r = torus.minor_radius;
        const double sigma1 = pressure * r / (2.0 * t);
        const double sigma2 =
            pressure * r / t *
            (1.0 - r * a.sin_theta / (2.0 * (torus.major_radius + r * a.sin_theta)));
        const Vec3 toroidal(-a.sin_phi, a.cos_phi, 0.0);
        const Vec3 poloidal(a.cos_theta * a.cos_phi, a.cos_theta * a.sin_phi, -a.sin_theta);
        return sigma1 * toroidal * toroidal.transpose() +
               sigma2 * poloidal * poloidal.transpose();
    };
    return exact;
}

}  // namespace membrane
