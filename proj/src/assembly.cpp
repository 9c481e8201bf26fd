#include "membrane/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "membrane/error.hpp"

namespace membrane {

std::vector<double> LinearSystem::to_global(std::span<const double> local) const {
    if (local.size() != dofs.size()) throw Error("assembly", "vector size does not match dofs");
    std::vector<double> global(local.begin(), local.end());
    for (const NodalFrame& f : frames) {
        const Vec3 l(local[3 * f.node], local[3 * f.node + 1], local[3 * f.node + 2]);
        const Vec3 g = f.axes * l;
        for (int c = 0; c < 3; ++c) global[3 * f.node + c] = g[c];
    }
    return global;
}

std::vector<double> LinearSystem::to_local(std::span<const double> global) const {
    if (global.size() != dofs.size()) throw Error("assembly", "vector size does not match dofs");
    std::vector<double> local(global.begin(), global.end());
    for (const NodalFrame& f : frames) {
        const Vec3 g(global[3 * f.node], global[3 * f.node + 1], global[3 * f.node + 2]);
        const Vec3 l = f.axes.transpose() * g;
        for (int c = 0; c < 3; ++c) local[3 * f.node + c] = l[c];
    }
    return local;
}

std::vector<bool> LinearSystem::constrained_mask() const {
    std::vector<bool> mask(dofs.size(), false);
    for (const NodalFrame& f : frames) {
        for (int c = 0; c < f.constrained; ++c) mask[3 * f.node + c] = true;
    }
    return mask;
}

ElementNodes element_nodes(const SurfaceMesh& mesh, std::size_t triangle) {
    const Triangle& tri = mesh.triangles()[triangle];
    ElementNodes nodes;
    for (int i = 0; i < 3; ++i) {
        nodes.coords[i] = mesh.vertices()[tri[i]];
        nodes.normals[i] = mesh.nodal_normals()[tri[i]];
    }
    return nodes;
}

namespace {

CsrMatrix block_pattern(const SurfaceMesh& mesh) {
    const std::size_t n = mesh.vertex_count();
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (const Triangle& tri : mesh.triangles()) {
        for (std::size_t a : tri) {
            for (std::size_t b : tri) adjacency[a].push_back(b);
        }
    }
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col;
    row_ptr.reserve(3 * n + 1);
    for (std::size_t node = 0; node < n; ++node) {
        auto& adj = adjacency[node];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        for (int a = 0; a < 3; ++a) {
            for (std::size_t other : adj) {
                for (std::size_t c = 0; c < 3; ++c) col.push_back(3 * other + c);
            }
            row_ptr.push_back(col.size());
        }
    }
    return CsrMatrix::from_pattern(std::move(row_ptr), std::move(col));
}

// Offset of block (I, J) within each of the three rows of block row I.
std::size_t block_offset(const CsrMatrix& m, std::size_t node_i, std::size_t node_j) {
    const std::size_t k = m.find(3 * node_i, 3 * node_j);
    if (k == CsrMatrix::npos) throw Error("assembly", "block outside the sparsity pattern");
    return k - m.row_ptr()[3 * node_i];
}

}  // namespace

LinearSystem assemble(const SurfaceMesh& mesh, const MaterialModel& material,
                      const LoadField& load, const QuadratureRule& quad, NormalVariant variant) {
    LinearSystem system;
    system.dofs.nodes = mesh.vertex_count();
    system.matrix = block_pattern(mesh);
    system.rhs.assign(system.dofs.size(), 0.0);
    system.node_positions = mesh.vertices();

    auto& values = system.matrix.values();
    const auto& row_ptr = system.matrix.row_ptr();
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Triangle& tri = mesh.triangles()[t];
        const ElementNodes nodes = element_nodes(mesh, t);
        Mat9 ke;
        Vec9 fe;
        try {
            ke = element_stiffness(nodes, material, quad, variant);
            fe = load ? element_load(nodes, load, quad, variant) : Vec9::Zero();
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "element " << t << ": " << e.what();
            throw Error("assembly", msg.str());
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const std::size_t offset = block_offset(system.matrix, tri[i], tri[j]);
                for (int a = 0; a < 3; ++a) {
                    const std::size_t base = row_ptr[3 * tri[i] + a] + offset;
                    for (int b = 0; b < 3; ++b) values[base + b] += ke(3 * i + a, 3 * j + b);
                }
            }
            for (int a = 0; a < 3; ++a) system.rhs[3 * tri[i] + a] += fe(3 * i + a);
        }
    }
    return system;
}

std::vector<Constraint> cylinder_constraints(const SurfaceMesh& mesh) {
    const BoundaryComponent* start = mesh.find_boundary("x=0");
    const BoundaryComponent* end = mesh.find_boundary("x=L");
    if (start == nullptr || end == nullptr) {
        throw Error("assembly", "cylinder constraints need boundary loops 'x=0' and 'x=L'");
    }
    std::vector<Constraint> constraints;
    constraints.reserve(start->vertices.size() + end->vertices.size());
    for (std::size_t v : start->vertices) constraints.push_back({v, Vec3::UnitX()});
    for (std::size_t v : end->vertices) {
        const Vec3& p = mesh.vertices()[v];
        const Vec3 radial(0.0, p.y(), p.z());
        if (radial.norm() == 0.0) throw Error("assembly", "boundary node on the cylinder axis");
        constraints.push_back({v, radial.normalized()});
    }
    return constraints;
}

Mat3 complete_frame(const std::vector<Vec3>& directions) {
    if (directions.empty() || directions.size() > 3) {
        throw Error("assembly", "a nodal frame takes 1 to 3 constraint directions");
    }
    std::vector<Vec3> axes;
    for (const Vec3& d : directions) {
        const double len = d.norm();
        if (len == 0.0) throw Error("assembly", "zero constraint direction");
        Vec3 q = d / len;
        for (const Vec3& a : axes) q -= q.dot(a) * a;
        if (q.norm() < 1e-8) throw Error("assembly", "dependent constraint directions at a node");
        axes.push_back(q.normalized());
    }
    while (axes.size() < 3) {
        int best = 0;
        double best_overlap = 2.0;
        for (int k = 0; k < 3; ++k) {
            double overlap = 0.0;
            for (const Vec3& a : axes) overlap += a[k] * a[k];
            if (overlap < best_overlap) {
                best_overlap = overlap;
                best = k;
            }
        }
        Vec3 q = Vec3::Unit(best);
        for (const Vec3& a : axes) q -= q.dot(a) * a;
        axes.push_back(q.normalized());
    }
    Mat3 frame;
    for (int c = 0; c < 3; ++c) frame.col(c) = axes[c];
    return frame;
}

LinearSystem apply_constraints(LinearSystem system, const std::vector<Constraint>& constraints) {
    if (!system.frames.empty()) throw Error("assembly", "system is already constrained");
    if (constraints.empty()) return system;

    std::map<std::size_t, std::vector<Vec3>> by_node;
    for (const Constraint& c : constraints) {
        if (c.node >= system.dofs.nodes) throw Error("assembly", "constraint node out of range");
        by_node[c.node].push_back(c.direction);
    }

    std::vector<const Mat3*> frame_of(system.dofs.nodes, nullptr);
    system.frames.reserve(by_node.size());
    for (const auto& [node, dirs] : by_node) {
        Mat3 axes;
        try {
            axes = complete_frame(dirs);
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "node " << node << ": " << e.what();
            throw Error("assembly", msg.str());
        }
        system.frames.push_back({node, axes, static_cast<int>(dirs.size())});
    }
    for (const NodalFrame& f : system.frames) frame_of[f.node] = &f.axes;

    // K' = T^T K T block by block, b' = T^T b.
    CsrMatrix& m = system.matrix;
    auto& values = m.values();
    const auto& row_ptr = m.row_ptr();
    const auto& col = m.col_index();
    for (std::size_t bi = 0; bi < system.dofs.nodes; ++bi) {
        const std::size_t r0 = row_ptr[3 * bi];
        const std::size_t len = row_ptr[3 * bi + 1] - r0;
        for (std::size_t off = 0; off < len; off += 3) {
            const std::size_t bj = col[r0 + off] / 3;
            if (frame_of[bi] == nullptr && frame_of[bj] == nullptr) continue;
            Mat3 block;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) block(a, b) = values[row_ptr[3 * bi + a] + off + b];
            }
            if (frame_of[bi] != nullptr) block = frame_of[bi]->transpose() * block;
            if (frame_of[bj] != nullptr) block = block * (*frame_of[bj]);
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) values[row_ptr[3 * bi + a] + off + b] = block(a, b);
            }
        }
    }
    system.rhs = system.to_local(system.rhs);

    // Eliminate constrained dofs; the pattern is symmetric so column entries
    // are found through the row's own column list.
    for (const NodalFrame& f : system.frames) {
        for (int c = 0; c < f.constrained; ++c) {
            const std::size_t dof = 3 * f.node + static_cast<std::size_t>(c);
            for (std::size_t k = row_ptr[dof]; k < row_ptr[dof + 1]; ++k) {
                const std::size_t j = col[k];
                values[k] = j == dof ? 1.0 : 0.0;
                if (j != dof) values[m.find(j, dof)] = 0.0;
            }
            system.rhs[dof] = 0.0;
        }
    }
    return system;
}

}  // namespace membrane
