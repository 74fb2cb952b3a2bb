#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Per-vertex planar coordinates of a disk-topology mesh.
using PlanarParam = std::vector<Vec2>;

/// Loads the OBJ subset `v x y z` / `f a b c` / `f a/at b/bt c/ct`.
/// Normals and texture coordinates are ignored on input. Isolated vertices
/// are dropped with a warning on stderr. Throws on malformed records and on
/// non-manifold connectivity.
TriMesh load_obj(const std::string& path);

/// Writes `v` lines (6 significant digits), optional `vt` lines (one per
/// vertex) and `f` lines (`a/at` form when uv is present).
void save_obj(const TriMesh& mesh, const std::optional<PlanarParam>& uv,
              const std::string& path);

}  // namespace dpoint
