#include "membrane/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "membrane/assembly.hpp"
#include "membrane/error.hpp"

namespace membrane {

Mat3 StressField::element_average(std::size_t triangle) const {
    Mat3 sum = Mat3::Zero();
    double weight = 0.0;
    for (const StressSample& s : elements.at(triangle)) {
        sum += s.weight * s.stress;
        weight += s.weight;
    }
    return weight > 0.0 ? Mat3(sum / weight) : sum;
}

StressField recover_stress(const SurfaceMesh& mesh, const MaterialModel& material,
                           const std::vector<double>& u, const QuadratureRule& quad,
                           NormalVariant variant) {
    if (u.size() != 3 * mesh.vertex_count()) {
        throw Error("postprocess", "displacement size does not match the mesh");
    }
    const double mu = material.mu();
    const double lambda = material.membrane_lambda();
    StressField field;
    field.elements.resize(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Triangle& tri = mesh.triangles()[t];
        Vec9 ue;
        for (int i = 0; i < 3; ++i) {
            for (int c = 0; c < 3; ++c) ue(3 * i + c) = u[3 * tri[i] + c];
        }
        for (const ElementPoint& p : element_points(element_nodes(mesh, t), quad, variant)) {
            const Mat3 proj = Mat3::Identity() - p.normal * p.normal.transpose();
            const Mat3 strain = proj * tangential_strain(p.gradients, ue) * proj;
            StressSample s;
            s.position = p.position;
            s.normal = p.normal;
            s.projected_strain = strain;
            s.stress = 2.0 * mu * strain + lambda * strain.trace() * proj;
            s.weight = p.measure;
            field.elements[t].push_back(s);
        }
    }
    return field;
}

double stress_l2_error(const StressField& field, const ExactSolution& exact) {
    double sum = 0.0;
    for (const auto& samples : field.elements) {
        for (const StressSample& s : samples) {
            sum += s.weight * (exact.stress_at(s.position) - s.stress).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

ConvergenceRecord convergence_rate(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 3) throw Error("postprocess", "convergence fit needs at least 3 samples");
    double sx = 0.0, sy = 0.0;
    for (const auto& [h, e] : samples) {
        if (!(h > 0.0) || !(e > 0.0)) {
            throw Error("postprocess", "mesh sizes and errors must be positive");
        }
        sx += std::log(h);
        sy += std::log(e);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [h, e] : samples) {
        sxx += (std::log(h) - mx) * (std::log(h) - mx);
        sxy += (std::log(h) - mx) * (std::log(e) - my);
    }
    if (sxx == 0.0) throw Error("postprocess", "convergence fit needs distinct mesh sizes");

    ConvergenceRecord record;
    record.slope = sxy / sxx;
    double ss = 0.0;
    for (const auto& [h, e] : samples) {
        const double fit = my + record.slope * (std::log(h) - mx);
        ss += (std::log(e) - fit) * (std::log(e) - fit);
    }
    record.fit_residual = std::sqrt(ss / n);
    record.samples = std::move(samples);
    return record;
}

void write_convergence_csv(const ConvergenceRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("postprocess", "cannot open " + path + " for writing");
    out << "h,error,rate\n";
    char buf[128];
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        const auto [h, e] = record.samples[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", h, e);
        out << buf;
        if (i > 0) {
            const auto [h0, e0] = record.samples[i - 1];
            std::snprintf(buf, sizeof buf, "%.17g", std::log(e / e0) / std::log(h / h0));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("postprocess", "write failed for " + path);
}

double von_mises(const Mat3& s) {
    const double dxy = s(0, 0) - s(1, 1);
    const double dyz = s(1, 1) - s(2, 2);
    const double dzx = s(2, 2) - s(0, 0);
    const double shear = s(0, 1) * s(0, 1) + s(1, 2) * s(1, 2) + s(0, 2) * s(0, 2);
    return std::sqrt(0.5 * (dxy * dxy + dyz * dyz + dzx * dzx) + 3.0 * shear);
}

void export_vtk(const SurfaceMesh& mesh, const std::vector<double>& u, const StressField& field,
                const std::string& path) {
    if (u.size() != 3 * mesh.vertex_count()) {
        throw Error("postprocess", "displacement size does not match the mesh");
    }
    if (field.elements.size() != mesh.triangle_count()) {
        throw Error("postprocess", "stress field size does not match the mesh");
    }
    std::ofstream out(path);
    if (!out) throw Error("postprocess", "cannot open " + path + " for writing");

    char buf[256];
    const auto triple = [&](double a, double b, double c) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", a, b, c);
        out << buf;
    };

    out << "# vtk DataFile Version 3.0\nmembrane shell solution\nASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertex_count() << " double\n";
    for (const Vec3& p : mesh.vertices()) triple(p.x(), p.y(), p.z());
    out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
    for (const Triangle& t : mesh.triangles()) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "CELL_TYPES " << mesh.triangle_count() << '\n';
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) out << "5\n";

    out << "POINT_DATA " << mesh.vertex_count() << '\n';
    out << "VECTORS displacement double\n";
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) triple(u[3 * v], u[3 * v + 1], u[3 * v + 2]);

    out << "CELL_DATA " << mesh.triangle_count() << '\n';
    out << "FIELD cell_fields 2\n";
    out << "stress 6 " << mesh.triangle_count() << " double\n";
    std::vector<double> vm(mesh.triangle_count());
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Mat3 s = field.element_average(t);
        vm[t] = von_mises(s);
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g\n", s(0, 0), s(1, 1),
                      s(2, 2), s(0, 1), s(1, 2), s(0, 2));
        out << buf;
    }
    out << "von_mises 1 " << mesh.triangle_count() << " double\n";
    for (double v : vm) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        out << buf;
    }
    if (!out) throw Error("postprocess", "write failed for " + path);
}

}  // namespace membrane
