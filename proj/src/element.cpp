#include "membrane/element.hpp"

#include <cmath>
#include <sstream>

#include "membrane/error.hpp"

namespace membrane {

QuadratureRule quadrature_rule(int order) {
    switch (order) {
        case 1:
            return {{{1.0 / 3.0, 1.0 / 3.0, 0.5}}};
        case 2:
            return {{{1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0},
                     {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                     {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}}};
        default: {
            std::ostringstream msg;
            msg << "unsupported quadrature order " << order;
            throw Error("element", msg.str());
        }
    }
}

ShapeFunctions shape_values_and_ref_gradients(double xi, double eta) {
    return {{1.0 - xi - eta, xi, eta}, {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)}};
}

Mat3 element_jacobian(const ElementNodes& nodes, double xi, double eta, NormalVariant variant) {
    const Vec3 t_xi = nodes.coords[1] - nodes.coords[0];
    const Vec3 t_eta = nodes.coords[2] - nodes.coords[0];
    const Vec3 facet = t_xi.cross(t_eta);
    const double facet_len = facet.norm();
    if (facet_len == 0.0) throw Error("element", "degenerate triangle");

    Vec3 normal;
    if (variant == NormalVariant::facet) {
        normal = facet / facet_len;
    } else {
        const ShapeFunctions shape = shape_values_and_ref_gradients(xi, eta);
        Vec3 blended = Vec3::Zero();
        for (int i = 0; i < 3; ++i) blended += shape.values[i] * nodes.normals[i];
        const double len = blended.norm();
        if (len == 0.0) throw Error("element", "interpolated normal vanishes");
        normal = blended / len;
    }

    // det J = (t_xi x t_eta) . n, i.e. facet area scaling times the cosine
    // between n^h and the facet normal.
    const double cosine = facet.dot(normal) / facet_len;
    if (std::abs(cosine) < 1e-8) {
        std::ostringstream msg;
        msg << "singular Jacobian at (" << xi << ", " << eta
            << "): interpolated normal lies in the facet plane (cos = " << cosine << ")";
        throw Error("element", msg.str());
    }

    Mat3 jac;
    jac.row(0) = t_xi.transpose();
    jac.row(1) = t_eta.transpose();
    jac.row(2) = normal.transpose();
    return jac;
}

std::array<Vec3, 3> basis_surface_gradients(const Mat3& jacobian,
                                            const std::array<Vec2, 3>& ref_gradients) {
    const Eigen::PartialPivLU<Mat3> lu(jacobian);
    const double scale = jacobian.row(0).norm() * jacobian.row(1).norm();
    if (!(std::abs(lu.determinant()) > 1e-8 * scale)) {
        throw Error("element", "singular Jacobian");
    }
    std::array<Vec3, 3> grads;
    for (int i = 0; i < 3; ++i) {
        grads[i] = lu.solve(Vec3(ref_gradients[i].x(), ref_gradients[i].y(), 0.0));
    }
    return grads;
}

StrainOperators strain_displacement(const std::array<Vec3, 3>& gradients) {
    StrainOperators ops;
    for (int node = 0; node < 3; ++node) {
        for (int comp = 0; comp < 3; ++comp) {
            Mat3 grad = Mat3::Zero();
            grad.row(comp) = gradients[node].transpose();
            ops[3 * node + comp] = 0.5 * (grad + grad.transpose());
        }
    }
    return ops;
}

Mat3 tangential_strain(const std::array<Vec3, 3>& gradients, const Vec9& u) {
    // (grad_S u)_{ab} = du_a / dx^S_b
    Mat3 grad = Mat3::Zero();
    for (int node = 0; node < 3; ++node) {
        grad += u.segment<3>(3 * node) * gradients[node].transpose();
    }
    return 0.5 * (grad + grad.transpose());
}

double membrane_energy_density(const Mat3& eps_u, const Mat3& eps_v, const Vec3& normal,
                               double mu, double lambda) {
    return 2.0 * mu * (eps_u.array() * eps_v.array()).sum() -
           4.0 * mu * (eps_u * normal).dot(eps_v * normal) +
           lambda * eps_u.trace() * eps_v.trace();
}

std::vector<ElementPoint> element_points(const ElementNodes& nodes, const QuadratureRule& quad,
                                         NormalVariant variant) {
    const double area_scale =
        (nodes.coords[1] - nodes.coords[0]).cross(nodes.coords[2] - nodes.coords[0]).norm();
    std::vector<ElementPoint> points;
    points.reserve(quad.points.size());
    for (const QuadraturePoint& q : quad.points) {
        const ShapeFunctions shape = shape_values_and_ref_gradients(q.xi, q.eta);
        const Mat3 jac = element_jacobian(nodes, q.xi, q.eta, variant);
        ElementPoint p;
        p.position = Vec3::Zero();
        for (int i = 0; i < 3; ++i) p.position += shape.values[i] * nodes.coords[i];
        p.normal = jac.row(2).transpose();
        p.shape = shape.values;
        p.gradients = basis_surface_gradients(jac, shape.ref_gradients);
        p.measure = q.weight * area_scale;
        points.push_back(p);
    }
    return points;
}

Mat9 element_stiffness(const ElementNodes& nodes, const MaterialModel& material,
                       const QuadratureRule& quad, NormalVariant variant) {
    const double mu = material.mu();
    const double lambda = material.membrane_lambda();
    Mat9 k = Mat9::Zero();
    for (const ElementPoint& p : element_points(nodes, quad, variant)) {
        const StrainOperators eps = strain_displacement(p.gradients);
        std::array<Vec3, 9> eps_n;
        std::array<double, 9> div;
        for (int a = 0; a < 9; ++a) {
            eps_n[a] = eps[a] * p.normal;
            div[a] = eps[a].trace();
        }
        for (int a = 0; a < 9; ++a) {
            for (int b = a; b < 9; ++b) {
                const double density = 2.0 * mu * (eps[a].array() * eps[b].array()).sum() -
                                       4.0 * mu * eps_n[a].dot(eps_n[b]) +
                                       lambda * div[a] * div[b];
                k(a, b) += p.measure * density;
            }
        }
    }
    k.triangularView<Eigen::StrictlyLower>() = k.transpose().triangularView<Eigen::StrictlyLower>();
    return material.thickness() * k;
}

Vec9 element_load(const ElementNodes& nodes, const LoadField& load, const QuadratureRule& quad,
                  NormalVariant variant) {
    Vec9 f = Vec9::Zero();
    for (const ElementPoint& p : element_points(nodes, quad, variant)) {
        const Vec3 value = load(p.position, p.normal);
        for (int i = 0; i < 3; ++i) f.segment<3>(3 * i) += p.measure * p.shape[i] * value;
    }
    return f;
}

}  // namespace membrane
