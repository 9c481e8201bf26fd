#include "membrane/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "membrane/error.hpp"

namespace membrane {

namespace {

std::size_t count_edges(const std::vector<Triangle>& triangles, std::size_t vertex_count) {
    // Undirected edge -> number of incident triangles.
    std::unordered_map<std::size_t, int> incidence;
    incidence.reserve(triangles.size() * 2);
    for (const Triangle& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            const std::size_t a = tri[k];
            const std::size_t b = tri[(k + 1) % 3];
            ++incidence[std::min(a, b) * vertex_count + std::max(a, b)];
        }
    }
    return incidence.size();
}

void check_normals(const std::vector<Vec3>& normals, std::size_t vertex_count) {
    if (normals.size() != vertex_count) {
        throw Error("mesh", "expected one nodal normal per vertex");
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (!(std::abs(normals[i].norm() - 1.0) <= 1e-12)) {
            std::ostringstream msg;
            msg << "nodal normal " << i << " is not unit length";
            throw Error("mesh", msg.str());
        }
    }
}

}  // namespace

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                         std::vector<Vec3> nodal_normals)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      normals_(std::move(nodal_normals)) {
    if (triangles_.empty()) throw Error("mesh", "mesh has no triangles");
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (std::size_t v : triangles_[t]) {
            if (v >= vertices_.size()) {
                std::ostringstream msg;
                msg << "triangle " << t << " references vertex " << v << " out of range";
                throw Error("mesh", msg.str());
            }
        }
        if (!(facet_area(t) > 0.0)) {
            std::ostringstream msg;
            msg << "triangle " << t << " is degenerate";
            throw Error("mesh", msg.str());
        }
    }
    check_normals(normals_, vertices_.size());
    boundary_ = membrane::boundary_components(triangles_, vertices_.size());
    edge_count_ = count_edges(triangles_, vertices_.size());
}

SurfaceMesh SurfaceMesh::with_normals(std::vector<Vec3> nodal_normals) const {
    check_normals(nodal_normals, vertices_.size());
    SurfaceMesh copy = *this;
    copy.normals_ = std::move(nodal_normals);
    return copy;
}

void SurfaceMesh::set_boundary_label(std::size_t component, std::string label) {
    if (component >= boundary_.size()) throw Error("mesh", "boundary component out of range");
    boundary_[component].label = std::move(label);
}

const BoundaryComponent* SurfaceMesh::find_boundary(const std::string& label) const {
    for (const BoundaryComponent& c : boundary_) {
        if (c.label == label) return &c;
    }
    return nullptr;
}

Vec3 SurfaceMesh::facet_normal(std::size_t triangle) const {
    const Triangle& tri = triangles_[triangle];
    const Vec3 e1 = vertices_[tri[1]] - vertices_[tri[0]];
    const Vec3 e2 = vertices_[tri[2]] - vertices_[tri[0]];
    return e1.cross(e2).normalized();
}

double SurfaceMesh::facet_area(std::size_t triangle) const {
    const Triangle& tri = triangles_[triangle];
    const Vec3 e1 = vertices_[tri[1]] - vertices_[tri[0]];
    const Vec3 e2 = vertices_[tri[2]] - vertices_[tri[0]];
    return 0.5 * e1.cross(e2).norm();
}

double SurfaceMesh::total_area() const {
    double area = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) area += facet_area(t);
    return area;
}

std::vector<BoundaryComponent> boundary_components(const std::vector<Triangle>& triangles,
                                                   std::size_t vertex_count) {
    const auto key = [vertex_count](std::size_t a, std::size_t b) { return a * vertex_count + b; };

    std::unordered_map<std::size_t, int> directed;
    std::unordered_map<std::size_t, int> undirected;
    directed.reserve(triangles.size() * 3);
    undirected.reserve(triangles.size() * 2);
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const Triangle& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            const std::size_t a = tri[k];
            const std::size_t b = tri[(k + 1) % 3];
            if (++undirected[key(std::min(a, b), std::max(a, b))] > 2) {
                std::ostringstream msg;
                msg << "non-manifold edge (" << a << ", " << b << ") at triangle " << t;
                throw Error("mesh", msg.str());
            }
            if (++directed[key(a, b)] > 1) {
                std::ostringstream msg;
                msg << "inconsistent orientation across edge (" << a << ", " << b
                    << ") at triangle " << t;
                throw Error("mesh", msg.str());
            }
        }
    }

    // Boundary half-edges have no twin. Ordered map keeps loop extraction
    // deterministic: each loop starts at its smallest vertex.
    std::map<std::size_t, std::size_t> next;
    for (const Triangle& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            const std::size_t a = tri[k];
            const std::size_t b = tri[(k + 1) % 3];
            if (directed.contains(key(b, a))) continue;
            if (!next.emplace(a, b).second) {
                std::ostringstream msg;
                msg << "boundary is not simple at vertex " << a;
                throw Error("mesh", msg.str());
            }
        }
    }

    std::vector<BoundaryComponent> loops;
    while (!next.empty()) {
        BoundaryComponent loop;
        const std::size_t start = next.begin()->first;
        std::size_t v = start;
        do {
            auto it = next.find(v);
            if (it == next.end()) {
                throw Error("mesh", "open boundary chain");
            }
            loop.vertices.push_back(v);
            v = it->second;
            next.erase(it);
        } while (v != start);
        loop.label = "boundary_" + std::to_string(loops.size());
        loops.push_back(std::move(loop));
    }
    return loops;
}

std::vector<BoundaryComponent> boundary_components(const SurfaceMesh& mesh) {
    return boundary_components(mesh.triangles(), mesh.vertex_count());
}

namespace {

// Split each parametric quad (i, j)-(i+1, j+1) along the same diagonal.
// Index i runs along the first parameter, j along the second (periodic).
std::vector<Triangle> structured_triangles(std::size_t n_first, std::size_t n_second,
                                           bool first_periodic) {
    const std::size_t rows = first_periodic ? n_first : n_first + 1;
    const auto id = [&](std::size_t i, std::size_t j) {
        return (i % rows) * n_second + (j % n_second);
    };
    std::vector<Triangle> tris;
    tris.reserve(2 * n_first * n_second);
    for (std::size_t i = 0; i < n_first; ++i) {
        for (std::size_t j = 0; j < n_second; ++j) {
            const std::size_t a = id(i, j);
            const std::size_t b = id(i, j + 1);
            const std::size_t c = id(i + 1, j + 1);
            const std::size_t d = id(i + 1, j);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    }
    return tris;
}

}  // namespace

SurfaceMesh build_cylinder_mesh(double radius, double length, std::size_t n_circ,
                                std::size_t n_axial) {
    if (n_circ < 3 || n_axial < 1) {
        throw Error("mesh", "cylinder mesh needs n_circ >= 3 and n_axial >= 1");
    }
    AnalyticSurface::cylinder(radius, length);  // validates r, L

    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    vertices.reserve(n_circ * (n_axial + 1));
    normals.reserve(n_circ * (n_axial + 1));
    for (std::size_t i = 0; i <= n_axial; ++i) {
        const double x = length * static_cast<double>(i) / static_cast<double>(n_axial);
        for (std::size_t j = 0; j < n_circ; ++j) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(n_circ);
            vertices.emplace_back(x, radius * std::cos(a), radius * std::sin(a));
            normals.emplace_back(0.0, std::cos(a), std::sin(a));
        }
    }
    SurfaceMesh mesh(std::move(vertices), structured_triangles(n_axial, n_circ, false),
                     std::move(normals));
    for (std::size_t c = 0; c < mesh.boundary_components().size(); ++c) {
        const std::size_t v = mesh.boundary_components()[c].vertices.front();
        mesh.set_boundary_label(c, mesh.vertices()[v].x() < 0.5 * length ? "x=0" : "x=L");
    }
    return mesh;
}

SurfaceMesh build_torus_mesh(double major_radius, double minor_radius, std::size_t n_tor,
                             std::size_t n_pol) {
    if (n_tor < 3 || n_pol < 3) {
        throw Error("mesh", "torus mesh needs n_tor >= 3 and n_pol >= 3");
    }
    AnalyticSurface::torus(major_radius, minor_radius);  // validates R > r > 0

    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    vertices.reserve(n_tor * n_pol);
    normals.reserve(n_tor * n_pol);
    for (std::size_t j = 0; j < n_tor; ++j) {
        const double phi =
            2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_tor);
        for (std::size_t k = 0; k < n_pol; ++k) {
            const double theta =
                2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_pol);
            const double rho = major_radius + minor_radius * std::sin(theta);
            vertices.emplace_back(rho * std::cos(phi), rho * std::sin(phi),
                                  minor_radius * std::cos(theta));
            normals.emplace_back(std::sin(theta) * std::cos(phi),
                                 std::sin(theta) * std::sin(phi), std::cos(theta));
        }
    }
    return SurfaceMesh(std::move(vertices), structured_triangles(n_tor, n_pol, true),
                       std::move(normals));
}

SurfaceMesh compute_nodal_normals(const SurfaceMesh& mesh, NormalMode mode,
                                  const AnalyticSurface* surface) {
    std::vector<Vec3> normals(mesh.vertex_count(), Vec3::Zero());
    if (mode == NormalMode::exact) {
        if (surface == nullptr) {
            throw Error("mesh", "exact normals require an analytic surface");
        }
        for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
            normals[i] = surface->normal_at(mesh.vertices()[i]).normalized();
        }
        return mesh.with_normals(std::move(normals));
    }

    // The unnormalized cross product is twice the area times the facet normal.
    for (const Triangle& tri : mesh.triangles()) {
        const Vec3& p0 = mesh.vertices()[tri[0]];
        const Vec3 weighted = (mesh.vertices()[tri[1]] - p0).cross(mesh.vertices()[tri[2]] - p0);
        for (std::size_t v : tri) normals[v] += weighted;
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
        const double len = normals[i].norm();
        if (len == 0.0) {
            std::ostringstream msg;
            msg << "averaged normal vanishes at vertex " << i;
            throw Error("mesh", msg.str());
        }
        normals[i] /= len;
    }
    return mesh.with_normals(std::move(normals));
}

double mesh_size(const SurfaceMesh& mesh) {
    double h = 0.0;
    for (const Triangle& tri : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            h = std::max(h, (mesh.vertices()[tri[k]] - mesh.vertices()[tri[(k + 1) % 3]]).norm());
        }
    }
    return h;
}

}  // namespace membrane
