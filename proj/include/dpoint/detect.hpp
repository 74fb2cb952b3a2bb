#pragma once

#include <vector>

#include "dpoint/param.hpp"
#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Per-triangle isometric distortion on a disk mesh. Masked triangles
/// (hole fills) never participate in clustering.
struct DistortionField {
    std::vector<double> e_iso;
    std::vector<char> masked;

    int size() const { return static_cast<int>(e_iso.size()); }
};

DistortionField make_distortion_field(const JacobianField& jac,
                                      const std::vector<char>& filled);

/// Candidate distortion vertices of one run, on the ORIGINAL mesh.
struct Candidate {
    int vertex = -1;      // original-mesh vertex index
    double peak_iso = 0;  // E_iso of the distortion triangle that produced it
};
using CandidateSet = std::vector<Candidate>;

/// Hierarchical median clustering: the first pass keeps triangles with
/// E_iso >= e_th and seeds the region queue with their edge-connected
/// components of size >= region_n; afterwards each popped region contributes
/// its argmax triangle and is split at the lower median of its values,
/// components of size >= region_n being re-queued. Returns distortion
/// triangle indices, sorted. An empty result is legal (no distortion points).
std::vector<int> detect_distortion_triangles(const DistortionField& field,
                                             const MeshTopology& topo, int region_n,
                                             double e_th);

/// One candidate vertex per distortion triangle: the corner maximizing the
/// summed E_iso of its incident (unmasked) triangles, ties to the smallest
/// original index, mapped through origin indices and deduplicated.
CandidateSet triangles_to_candidates(const std::vector<int>& tris,
                                     const DistortionField& field, const TriMesh& disk,
                                     const MeshTopology& topo);

/// Region-size threshold N = max(1, round(0.001 * min(num_vertices, cap))).
int region_threshold(int num_vertices, int simplify_cap);

}  // namespace dpoint
