#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "membrane/element.hpp"
#include "membrane/error.hpp"
#include "oracles.hpp"

using namespace membrane;
using doctest::Approx;

namespace {

ElementNodes flat_nodes(const std::array<Vec3, 3>& x) {
    const Vec3 n = (x[1] - x[0]).cross(x[2] - x[0]).normalized();
    return {x, {n, n, n}};
}

ElementNodes to_nodes(const oracle::RandomElement& e) { return {e.x, e.n}; }

double relative_max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("quadrature rules") {
    for (int order : {1, 2}) {
        double sum = 0.0;
        for (const auto& q : quadrature_rule(order).points) {
            sum += q.weight;
            CHECK(q.xi >= 0.0);
            CHECK(q.eta >= 0.0);
            CHECK(q.xi + q.eta <= 1.0);
        }
        CHECK(sum == Approx(0.5).epsilon(1e-15));
    }
    const auto integrate = [](int order, auto f) {
        double s = 0.0;
        for (const auto& q : quadrature_rule(order).points) s += q.weight * f(q.xi, q.eta);
        return s;
    };
    CHECK(integrate(2, [](double x, double y) { return x * y; }) == Approx(1.0 / 24).epsilon(1e-15));
    CHECK(integrate(2, [](double x, double) { return x * x; }) == Approx(1.0 / 12).epsilon(1e-15));
    CHECK(integrate(1, [](double, double) { return 3.0; }) == Approx(1.5).epsilon(1e-15));
    CHECK(integrate(1, [](double x, double) { return x * x; }) == Approx(1.0 / 18).epsilon(1e-15));
    CHECK(integrate(1, [](double x, double) { return x * x; }) != Approx(1.0 / 12));
    CHECK_THROWS_AS(quadrature_rule(3), Error);
    CHECK_THROWS_AS(quadrature_rule(0), Error);
}

TEST_CASE("shape functions") {
    const auto at0 = shape_values_and_ref_gradients(0, 0);
    CHECK(at0.values == std::array<double, 3>{1, 0, 0});
    const auto c = shape_values_and_ref_gradients(1.0 / 3, 1.0 / 3);
    for (double v : c.values) CHECK(v == Approx(1.0 / 3).epsilon(1e-15));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int k = 0; k < 20; ++k) {
        const auto s = shape_values_and_ref_gradients(u(rng), u(rng));
        CHECK(s.values[0] + s.values[1] + s.values[2] == Approx(1.0).epsilon(1e-15));
        CHECK((s.ref_gradients[0] + s.ref_gradients[1] + s.ref_gradients[2]).norm() == 0.0);
    }
}

TEST_CASE("element Jacobian") {
    const ElementNodes unit = flat_nodes({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    for (auto variant : {NormalVariant::interpolated, NormalVariant::facet}) {
        CHECK((element_jacobian(unit, 0.2, 0.3, variant) - Mat3::Identity()).norm() == 0.0);
    }

    std::mt19937_64 rng(2);
    for (int k = 0; k < 50; ++k) {
        const auto e = oracle::random_element(rng);
        const ElementNodes nodes = to_nodes(e);
        const Mat3 J0 = element_jacobian(nodes, 0.1, 0.2, NormalVariant::facet);
        const Mat3 J1 = element_jacobian(nodes, 0.7, 0.1, NormalVariant::facet);
        CHECK((J0 - J1).norm() == 0.0);
        // det J of the facet variant is twice the triangle area (Heron).
        const double a = (e.x[1] - e.x[0]).norm(), b = (e.x[2] - e.x[1]).norm(), c = (e.x[0] - e.x[2]).norm();
        const double s = 0.5 * (a + b + c);
        const double heron = std::sqrt(s * (s - a) * (s - b) * (s - c));
        CHECK(J0.determinant() == Approx(2 * heron).epsilon(1e-10));
        // The interpolated row is a unit vector between the nodal normals.
        const Mat3 Ji = element_jacobian(nodes, 0.25, 0.25, NormalVariant::interpolated);
        const Vec3 blend = (0.5 * e.n[0] + 0.25 * e.n[1] + 0.25 * e.n[2]).normalized();
        CHECK((Ji.row(2).transpose() - blend).norm() <= 1e-15);
    }
}

TEST_CASE("singular Jacobian is reported") {
    ElementNodes nodes = flat_nodes({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    nodes.normals = {Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(1, 0, 0)};
    CHECK_THROWS_WITH_AS(element_jacobian(nodes, 0.2, 0.2, NormalVariant::interpolated),
                         doctest::Contains("singular Jacobian"), Error);
    CHECK_NOTHROW(element_jacobian(nodes, 0.2, 0.2, NormalVariant::facet));
    CHECK_THROWS_AS(element_stiffness(nodes, MaterialModel(1, 0.3, 1), quadrature_rule(2),
                                      NormalVariant::interpolated),
                    Error);
    const ElementNodes degenerate{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)},
                                  {Vec3(0, 0, 1), Vec3(0, 0, 1), Vec3(0, 0, 1)}};
    CHECK_THROWS_AS(element_jacobian(degenerate, 0.2, 0.2, NormalVariant::facet), Error);
}

TEST_CASE("basis surface gradients") {
    const auto ref = shape_values_and_ref_gradients(0.3, 0.3).ref_gradients;
    const ElementNodes unit = flat_nodes({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
    const auto g = basis_surface_gradients(element_jacobian(unit, 0.3, 0.3, NormalVariant::interpolated), ref);
    CHECK((g[0] - Vec3(-1, -1, 0)).norm() == 0.0);
    CHECK((g[1] - Vec3(1, 0, 0)).norm() == 0.0);
    CHECK((g[2] - Vec3(0, 1, 0)).norm() == 0.0);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        const auto e = oracle::random_element(rng);
        for (const auto& q : quadrature_rule(2).points) {
            const Mat3 J = element_jacobian(to_nodes(e), q.xi, q.eta, NormalVariant::interpolated);
            const auto grads = basis_surface_gradients(J, ref);
            const Vec3 n = J.row(2).transpose();
            for (const Vec3& gi : grads) CHECK(std::abs(n.dot(gi)) <= 1e-13);
            CHECK((grads[0] + grads[1] + grads[2]).norm() <= 1e-13);
        }
        // Facet variant reproduces the flat P1 gradients.
        const auto gf = basis_surface_gradients(element_jacobian(to_nodes(e), 0, 0, NormalVariant::facet), ref);
        const auto go = oracle::flat_gradients(e.x);
        for (int i = 0; i < 3; ++i) CHECK((gf[i] - go[i]).norm() <= 1e-12 * go[i].norm());
    }
    Mat3 singular = Mat3::Identity();
    singular.row(2) = singular.row(0);
    CHECK_THROWS_AS(basis_surface_gradients(singular, ref), Error);
}

TEST_CASE("strain of a linear field on a flat element") {
    // u(x) = A x with A(i, j) = du_i/dx_j; eps_S has the in-plane
    // symmetric part, half-shears du_3/dx_j, and a zero (3, 3) entry.
    Mat3 A;
    A << 0.3, -0.2, 0.5,
         0.7, 0.1, -0.4,
         0.9, -0.6, 0.8;
    const std::array<Vec3, 3> x{Vec3(0.1, 0.2, 0.0), Vec3(1.3, 0.1, 0.0), Vec3(0.4, 1.1, 0.0)};
    const ElementNodes nodes = flat_nodes(x);
    Vec9 u;
    for (int i = 0; i < 3; ++i) u.segment<3>(3 * i) = A * x[i];
    const auto ref = shape_values_and_ref_gradients(0.2, 0.2).ref_gradients;
    const auto g = basis_surface_gradients(element_jacobian(nodes, 0.2, 0.2, NormalVariant::interpolated), ref);
    const Mat3 eps = tangential_strain(g, u);

    Mat3 expected;
    expected << A(0, 0), 0.5 * (A(0, 1) + A(1, 0)), 0.5 * A(2, 0),
                0.5 * (A(0, 1) + A(1, 0)), A(1, 1), 0.5 * A(2, 1),
                0.5 * A(2, 0), 0.5 * A(2, 1), 0.0;
    CHECK((eps - expected).cwiseAbs().maxCoeff() <= 1e-14);

    const Mat3 P = projector(Vec3(0, 0, 1));
    Mat3 expected_p = expected;
    expected_p.row(2).setZero();
    expected_p.col(2).setZero();
    CHECK((P * eps * P - expected_p).cwiseAbs().maxCoeff() <= 1e-14);

    // Superposition of the unit strain operators reproduces the strain.
    const StrainOperators ops = strain_displacement(g);
    Mat3 sum = Mat3::Zero();
    for (int d = 0; d < 9; ++d) sum += u[d] * ops[d];
    CHECK((sum - eps).cwiseAbs().maxCoeff() <= 1e-15);

    Vec9 translation;
    for (int i = 0; i < 3; ++i) translation.segment<3>(3 * i) = Vec3(1.5, -2.0, 0.7);
    CHECK(tangential_strain(g, translation).norm() <= 1e-14);
}

TEST_CASE("three-term energy equals the double-projection energy") {
    std::mt19937_64 rng(4);
    const double mu = 7.0, lambda = 3.0;
    for (int k = 0; k < 200; ++k) {
        const auto e = oracle::random_element(rng);
        std::array<Vec3, 3> ua, ub;
        for (int i = 0; i < 3; ++i) {
            ua[i] = oracle::random_vec(rng);
            ub[i] = oracle::random_vec(rng);
        }
        Vec9 va, vb;
        for (int i = 0; i < 3; ++i) {
            va.segment<3>(3 * i) = ua[i];
            vb.segment<3>(3 * i) = ub[i];
        }
        for (const auto& q : quadrature_rule(2).points) {
            const Mat3 J = element_jacobian(to_nodes(e), q.xi, q.eta, NormalVariant::interpolated);
            const Vec3 n = J.row(2).transpose();
            const auto g = basis_surface_gradients(J, shape_values_and_ref_gradients(q.xi, q.eta).ref_gradients);
            const Mat3 ea = oracle::strain_from(g, ua), eb = oracle::strain_from(g, ub);
            const Mat3 P = Mat3::Identity() - n * n.transpose();
            const Mat3 pa = P * ea * P, pb = P * eb * P;
            const double direct = 2 * mu * (pa.cwiseProduct(pb)).sum() + lambda * pa.trace() * pb.trace();
            const double three_term = membrane_energy_density(tangential_strain(g, va), tangential_strain(g, vb),
                                                              n, mu, lambda);
            CHECK(std::abs(three_term - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("flat element stiffness equals the CST stiffness") {
    std::mt19937_64 rng(5);
    for (auto mode : {ElasticityMode::plane_stress}) {
        for (int k = 0; k < 100; ++k) {
            const auto e = oracle::random_element(rng);
            const MaterialModel m(100.0, 0.5, 0.01, mode);
            const Mat9 oracle_k = oracle::cst_stiffness_3d(e.x, 100.0, 0.5, 0.01);
            for (int order : {1, 2}) {
                for (auto variant : {NormalVariant::interpolated, NormalVariant::facet}) {
                    const Mat9 K = element_stiffness(flat_nodes(e.x), m, quadrature_rule(order), variant);
                    CHECK(relative_max_diff(K, oracle_k) <= 1e-10);
                }
            }
        }
    }
    // Poisson ratio other than 1/2 as well.
    const std::array<Vec3, 3> x{Vec3(0, 0, 0), Vec3(2, 0.5, 0), Vec3(0.3, 1.5, 0)};
    const Mat9 K = element_stiffness(flat_nodes(x), MaterialModel(210.0, 0.3, 0.2), quadrature_rule(2),
                                     NormalVariant::interpolated);
    CHECK(relative_max_diff(K, oracle::cst_stiffness_3d(x, 210.0, 0.3, 0.2)) <= 1e-10);
}

TEST_CASE("element stiffness symmetry, semidefiniteness and kernel") {
    std::mt19937_64 rng(6);
    const MaterialModel m(100.0, 0.5, 0.01);
    for (int k = 0; k < 200; ++k) {
        const auto e = oracle::random_element(rng);
        const Mat9 K = element_stiffness(to_nodes(e), m, quadrature_rule(2), NormalVariant::interpolated);
        CHECK((K - K.transpose()).norm() <= 1e-13 * K.norm());
        const Eigen::SelfAdjointEigenSolver<Mat9> eig(K);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
        for (int c = 0; c < 3; ++c) {
            Vec9 t = Vec9::Zero();
            for (int i = 0; i < 3; ++i) t[3 * i + c] = 1.0;
            CHECK((K * t).norm() <= 1e-12 * K.norm() * t.norm());
        }
    }

    // Infinitesimal in-plane rotation about the facet normal of a flat element.
    const std::array<Vec3, 3> x{Vec3(0.2, 0.1, 0.3), Vec3(1.1, 0.4, -0.2), Vec3(0.0, 1.0, 0.5)};
    const ElementNodes nodes = flat_nodes(x);
    const Mat9 K = element_stiffness(nodes, m, quadrature_rule(2), NormalVariant::interpolated);
    const Vec3 n = nodes.normals[0];
    Vec9 rot;
    for (int i = 0; i < 3; ++i) rot.segment<3>(3 * i) = n.cross(x[i]);
    CHECK(rot.dot(K * rot) <= 1e-12 * K.norm() * rot.squaredNorm());
}

TEST_CASE("facet and interpolated variants agree on flat elements") {
    std::mt19937_64 rng(8);
    const MaterialModel m(100.0, 0.5, 0.01);
    for (int k = 0; k < 50; ++k) {
        const ElementNodes nodes = flat_nodes(oracle::random_element(rng).x);
        const Mat9 a = element_stiffness(nodes, m, quadrature_rule(2), NormalVariant::interpolated);
        const Mat9 b = element_stiffness(nodes, m, quadrature_rule(2), NormalVariant::facet);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15 * a.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("element load") {
    // Unit-area flat triangle.
    const ElementNodes nodes = flat_nodes({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0)});
    const Vec9 f = element_load(nodes, [](const Vec3&, const Vec3&) { return Vec3(0, 0, 1); }, quadrature_rule(2));
    for (int i = 0; i < 3; ++i) CHECK((f.segment<3>(3 * i) - Vec3(0, 0, 1.0 / 3)).norm() <= 1e-15);
    CHECK(element_load(nodes, [](const Vec3&, const Vec3&) { return Vec3::Zero().eval(); }, quadrature_rule(1))
              .norm() == 0.0);

    // Linear load against the seven-point rule on an independent affine map.
    std::mt19937_64 rng(9);
    Mat3 G;
    for (int r = 0; r < 3; ++r) G.row(r) = oracle::random_vec(rng).transpose();
    const Vec3 c0 = oracle::random_vec(rng);
    const LoadField linear = [&](const Vec3& x, const Vec3&) { return Vec3(G * x + c0); };
    for (int k = 0; k < 20; ++k) {
        const auto e = oracle::random_element(rng);
        const Vec9 got = element_load(flat_nodes(e.x), linear, quadrature_rule(2));
        Vec9 want = Vec9::Zero();
        const double jac = (e.x[1] - e.x[0]).cross(e.x[2] - e.x[0]).norm();
        for (const auto& q : oracle::seven_point_rule()) {
            const double phi[3] = {1 - q.xi - q.eta, q.xi, q.eta};
            const Vec3 x = phi[0] * e.x[0] + phi[1] * e.x[1] + phi[2] * e.x[2];
            for (int i = 0; i < 3; ++i) want.segment<3>(3 * i) += q.w * jac * phi[i] * (G * x + c0);
        }
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-13 * want.cwiseAbs().maxCoeff());
    }
}
