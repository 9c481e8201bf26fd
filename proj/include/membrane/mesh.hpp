#pragma once

#include <string>
#include <vector>

#include "membrane/geometry.hpp"
#include "membrane/types.hpp"

namespace membrane {

/// Closed loop of boundary vertices, ordered along the boundary orientation
/// induced by the triangles. The first vertex is not repeated at the end.
struct BoundaryComponent {
    std::vector<std::size_t> vertices;
    std::string label;
};

/// Oriented, manifold triangle mesh with one unit normal per vertex.
///
/// The constructor validates the topology (index range, positive areas,
/// consistent orientation, at most two triangles per edge) and extracts the
/// boundary loops, labelled "boundary_<k>" until relabelled.
class SurfaceMesh {
public:
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
                std::vector<Vec3> nodal_normals);

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Vec3>& nodal_normals() const noexcept { return normals_; }
    const std::vector<BoundaryComponent>& boundary_components() const noexcept {
        return boundary_;
    }

    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t triangle_count() const noexcept { return triangles_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    /// Same mesh with a different normal field (validated).
    SurfaceMesh with_normals(std::vector<Vec3> nodal_normals) const;

    void set_boundary_label(std::size_t component, std::string label);
    const BoundaryComponent* find_boundary(const std::string& label) const;

    /// Unit facet normal following the triangle's vertex order.
    Vec3 facet_normal(std::size_t triangle) const;
    double facet_area(std::size_t triangle) const;
    double total_area() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Vec3> normals_;
    std::vector<BoundaryComponent> boundary_;
    std::size_t edge_count_ = 0;
};

/// Boundary loops of an arbitrary triangle list. Throws on non-manifold
/// edges, inconsistently oriented neighbours, or non-simple boundaries.
std::vector<BoundaryComponent> boundary_components(const std::vector<Triangle>& triangles,
                                                   std::size_t vertex_count);
std::vector<BoundaryComponent> boundary_components(const SurfaceMesh& mesh);

/// Axis along x, ends at x = 0 ("x=0") and x = L ("x=L"), exact radial normals.
/// Vertex (i, j) sits at x = L i / n_axial, angle 2 pi j / n_circ.
SurfaceMesh build_cylinder_mesh(double radius, double length, std::size_t n_circ,
                                std::size_t n_axial);

/// Vertex (j, k) sits at toroidal angle 2 pi j / n_tor and poloidal angle
/// 2 pi k / n_pol (see AnalyticSurface for the convention). Exact normals.
SurfaceMesh build_torus_mesh(double major_radius, double minor_radius, std::size_t n_tor,
                             std::size_t n_pol);

enum class NormalMode { exact, averaged };

/// Exact mode evaluates the surface normal at every vertex and needs
/// `surface`; averaged mode uses the renormalized area-weighted mean of the
/// incident facet normals.
SurfaceMesh compute_nodal_normals(const SurfaceMesh& mesh, NormalMode mode,
                                  const AnalyticSurface* surface = nullptr);

/// Maximum edge length.
double mesh_size(const SurfaceMesh& mesh);

}  // namespace membrane
