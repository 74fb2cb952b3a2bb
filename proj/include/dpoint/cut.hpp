#pragma once

#include <span>
#include <vector>

#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Ordered vertex indices along mesh edges. A closed loop does not repeat
/// its start vertex.
struct EdgePath {
    std::vector<int> vertices;
    bool closed = false;

    double length(const TriMesh& mesh) const;
    int num_edges() const {
        return closed ? static_cast<int>(vertices.size())
                      : static_cast<int>(vertices.size()) - 1;
    }
};

/// Validates an EdgePath against a mesh: consecutive vertices share an edge,
/// open paths have >= 2 vertices and no repeats, loops have >= 3 vertices and
/// no internal repeats. Throws on violation.
void validate_path(const MeshTopology& topo, const EdgePath& path);

/// Slices the mesh open along the union of the given edge paths. Around each
/// cut vertex the incident triangles are split into sectors separated by cut
/// edges and each sector receives its own vertex copy; vertices with a single
/// sector (path endpoints, off-cut vertices) are not duplicated. Triangle
/// count is unchanged. The result carries origin indices composed with the
/// input's, so voting can always count on source-mesh vertices.
TriMesh cut_along(const TriMesh& mesh, std::span<const EdgePath> paths);
TriMesh cut_along(const TriMesh& mesh, const EdgePath& path);

/// Same surgery for an arbitrary set of mesh edges (used for tree-shaped
/// cuts that are not a disjoint union of simple paths).
TriMesh cut_along_edges(const TriMesh& mesh, const std::vector<std::pair<int, int>>& edges);

struct FillResult {
    TriMesh mesh;
    std::vector<int> filled_triangles;  // indices of fan triangles in `mesh`
};

/// Closes every boundary loop with a triangle fan to a new centroid vertex
/// (origin index -1). Throws if the mesh is already closed.
FillResult fill_holes(const TriMesh& mesh);

}  // namespace dpoint
