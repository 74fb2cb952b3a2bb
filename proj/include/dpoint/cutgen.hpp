#pragma once

#include <vector>

#include "dpoint/cut.hpp"
#include "dpoint/rng.hpp"
#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Disk-topology cut of a closed source mesh. `disk` has exactly one
/// boundary loop and genus 0; its origin indices point into the source mesh
/// (-1 for hole-fill centroids). `filled` flags disk triangles that were
/// created by hole filling and must be excluded from distortion reporting.
struct CutResult {
    TriMesh disk;
    std::vector<EdgePath> cut_paths;  // vertex indices on the source mesh (-1 where a
                                      // path crosses a hole-fill vertex)
    std::vector<char> filled;         // per disk triangle
    double cut_length = 0.0;          // total length of all cut edges

    int num_filled() const;
};

/// Vertex maximizing Euclidean distance from `from`; ties go to the smallest
/// index.
int farthest_vertex(const TriMesh& mesh, int from);

/// Single-source Dijkstra over the edge graph with Euclidean edge lengths.
struct DijkstraResult {
    std::vector<double> dist;
    std::vector<int> pred;
};
DijkstraResult dijkstra(const TriMesh& mesh, const MeshTopology& topo, int source);

/// Shortest path between a and b along mesh edges. Throws when b is
/// unreachable.
EdgePath shortest_edge_path(const TriMesh& mesh, int a, int b);
EdgePath shortest_edge_path(const TriMesh& mesh, const MeshTopology& topo, int a, int b);

/// Random cut of a closed genus-zero mesh: uniform start vertex, farthest
/// endpoint, shortest edge path, slice open.
CutResult random_genus0_cut(const TriMesh& mesh, RngStream& rng);

/// 2g independent closed homology loops via tree-cotree decomposition. Edge
/// weights are Euclidean lengths scaled by per-run random factors in
/// [1, 1+rho] so the loops vary between runs; rng == nullptr disables the
/// perturbation and fixes the tree root. Returns {} on genus-zero input.
std::vector<EdgePath> handle_loops(const TriMesh& mesh, RngStream* rng, double rho);

/// Full cut-to-disk: for genus zero this is random_genus0_cut; otherwise
/// handle loops are cut greedily (vertex-disjoint subsets, repeated until
/// genus zero), holes are filled, and the genus-zero procedure finishes the
/// job.
CutResult to_disk(const TriMesh& mesh, RngStream& rng, double rho = 0.5);

}  // namespace dpoint
