#pragma once

#include <vector>

#include "membrane/element.hpp"
#include "membrane/mesh.hpp"
#include "membrane/sparse.hpp"

namespace membrane {

/// dof = 3 * node + component, components are global x, y, z.
struct DofMap {
    std::size_t nodes = 0;

    std::size_t size() const noexcept { return 3 * nodes; }
    static constexpr std::size_t index(std::size_t node, std::size_t component) noexcept {
        return 3 * node + component;
    }
};

/// Homogeneous condition q . u(node) = 0.
struct Constraint {
    std::size_t node;
    Vec3 direction;
};

/// Orthonormal nodal frame: columns of `axes` are the local dof directions,
/// the first `constrained` of them are eliminated.
struct NodalFrame {
    std::size_t node;
    Mat3 axes;
    int constrained;
};

/// Global system K u = b. Dofs of nodes listed in `frames` are expressed in
/// their rotated frame; all other dofs in global coordinates.
struct LinearSystem {
    DofMap dofs;
    CsrMatrix matrix;
    std::vector<double> rhs;
    std::vector<NodalFrame> frames;
    std::vector<Vec3> node_positions;

    /// Map a solution in system coordinates to global x, y, z components.
    std::vector<double> to_global(std::span<const double> local) const;
    /// Inverse of to_global (constrained components are kept, not zeroed).
    std::vector<double> to_local(std::span<const double> global) const;
    /// True for dofs eliminated by a constraint.
    std::vector<bool> constrained_mask() const;
};

ElementNodes element_nodes(const SurfaceMesh& mesh, std::size_t triangle);

/// Sums element stiffness and load contributions in element order. Every
/// node pair sharing an element gets a full 3x3 block in the pattern.
LinearSystem assemble(const SurfaceMesh& mesh, const MaterialModel& material,
                      const LoadField& load, const QuadratureRule& quad,
                      NormalVariant variant = NormalVariant::interpolated);

/// Axial constraint (1, 0, 0) on the "x=0" loop, radial (0, y, z)/|(y, z)|
/// on the "x=L" loop.
std::vector<Constraint> cylinder_constraints(const SurfaceMesh& mesh);

/// Rotates each constrained node into an orthonormal frame whose leading
/// axes span the constraint directions (completed by Gram-Schmidt against
/// the coordinate axis most orthogonal to the frame so far), then replaces
/// the constrained rows and columns by identity with zero right-hand side.
LinearSystem apply_constraints(LinearSystem system, const std::vector<Constraint>& constraints);

/// Completes 1-3 linearly independent directions to an orthonormal frame.
Mat3 complete_frame(const std::vector<Vec3>& directions);

}  // namespace membrane
