#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace dpoint {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Indexed triangle mesh. Triangles are counter-clockwise vertex index
/// triples. `origin` (optional, empty if unused) maps each vertex of a
/// derived mesh back to the vertex of the source mesh it was copied from;
/// -1 marks vertices with no source (e.g. hole-fill centroids).
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> origin;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    bool has_origin() const { return !origin.empty(); }

    /// Origin index of vertex v, or v itself when the mesh is a source mesh.
    int origin_of(int v) const { return origin.empty() ? v : origin[v]; }

    double total_area() const;
    double mean_edge_length() const;
};

struct MeshEdge {
    int a = -1, b = -1;        // endpoint vertices, a < b
    int tri[2] = {-1, -1};     // incident triangles (tri[1] == -1 on boundary)
    bool boundary() const { return tri[1] < 0; }
};

/// Connectivity derived from a TriMesh. Construction validates that the mesh
/// is an orientable 2-manifold (with or without boundary) and throws
/// otherwise. Immutable after construction.
class MeshTopology {
public:
    explicit MeshTopology(const TriMesh& mesh);

    int num_vertices() const { return static_cast<int>(vertex_tris_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_triangles() const { return num_triangles_; }

    const std::vector<MeshEdge>& edges() const { return edges_; }
    const std::vector<int>& vertex_triangles(int v) const { return vertex_tris_[v]; }
    const std::vector<int>& vertex_neighbors(int v) const { return vertex_nbrs_[v]; }

    /// Edge id for vertex pair (u,v), or -1 if not an edge.
    int edge_between(int u, int v) const;

    /// Triangles sharing an edge with triangle t (2 or 3 entries).
    const std::vector<int>& triangle_neighbors(int t) const { return tri_nbrs_[t]; }

    bool is_closed() const { return boundary_edges_.empty(); }
    const std::vector<int>& boundary_edges() const { return boundary_edges_; }

    /// Ordered boundary loops; each loop lists vertices so that consecutive
    /// pairs are boundary edges traversed with the surface on the left.
    std::vector<std::vector<int>> boundary_loops() const;

    int euler_characteristic() const;

    /// Genus of a closed surface from V - E + F = 2 - 2g. Throws if the mesh
    /// has boundary.
    int genus() const;

private:
    int num_triangles_ = 0;
    std::vector<MeshEdge> edges_;
    std::unordered_map<std::uint64_t, int> edge_index_;
    std::vector<std::vector<int>> vertex_tris_;
    std::vector<std::vector<int>> vertex_nbrs_;
    std::vector<std::vector<int>> tri_nbrs_;
    std::vector<int> boundary_edges_;
    std::vector<std::array<int, 3>> directed_next_;  // per-tri boundary bookkeeping
    const TriMesh* mesh_ = nullptr;
};

/// Vertices reachable from v within n edge hops, excluding v itself.
/// n = 0 yields the empty set.
std::vector<int> n_ring(const MeshTopology& topo, int v, int n);

}  // namespace dpoint
