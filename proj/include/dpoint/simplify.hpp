#pragma once

#include "dpoint/trimesh.hpp"
#include "dpoint/vote.hpp"

namespace dpoint {

struct SimplifyResult {
    TriMesh mesh;
    int target = 0;
    bool reached_target = false;  // false when manifold constraints blocked
                                  // further collapses before the target
};

/// Quadric-error-metric edge-collapse simplification of a closed manifold
/// mesh down to `target` vertices. Collapses that would pinch the surface
/// (link condition), flip a face normal past 90 degrees, or change the genus
/// are rejected. Placement is the quadric minimizer, falling back to the best
/// of the two endpoints and the midpoint when the quadric is singular.
SimplifyResult qem_simplify(const TriMesh& mesh, int target);

/// Maps points detected on a simplified mesh back to the nearest vertices of
/// the original mesh (Euclidean, ties to the smallest index). Duplicate
/// targets are merged keeping the larger vote count.
DistortionPointSet map_back(const DistortionPointSet& points, const TriMesh& simplified,
                            const TriMesh& original);

/// Nearest vertex of `mesh` to a query point via a uniform spatial hash grid.
int nearest_vertex(const TriMesh& mesh, const Vec3& query);

}  // namespace dpoint
