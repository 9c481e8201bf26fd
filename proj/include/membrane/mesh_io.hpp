#pragma once

#include <string>

#include "membrane/mesh.hpp"

namespace membrane {

enum class MeshFormat { off, obj };

/// Picks the format from the file extension (.off / .obj, case-insensitive).
MeshFormat mesh_format_from_path(const std::string& path);

/// ASCII OFF or OBJ reader, triangles only. Nodal normals are averaged from
/// the facets; orientation is validated by SurfaceMesh.
SurfaceMesh import_mesh(const std::string& path, MeshFormat format);

/// Same, reading from an in-memory string.
SurfaceMesh parse_mesh(const std::string& text, MeshFormat format);

}  // namespace membrane
