#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dpoint/detect.hpp"
#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Votes per original-mesh vertex over R candidate runs.
struct VoteTally {
    std::map<int, int> counts;
    int runs = 0;
};

struct DistortionPoint {
    int vertex = -1;
    int votes = 0;
};

struct DistortionPointSet {
    std::vector<DistortionPoint> points;

    bool contains(int vertex) const {
        for (const auto& p : points)
            if (p.vertex == vertex) return true;
        return false;
    }
};

/// Counts in how many runs each vertex appears (candidates are deduplicated
/// per run upstream, so counts never exceed the run count).
VoteTally tally(const std::vector<CandidateSet>& runs);

/// Keeps vertices with at least `min_votes` votes.
DistortionPointSet select(const VoteTally& t, int min_votes);

/// Greedy near-duplicate removal: points are visited by descending votes
/// (ties: ascending vertex index) and accepted only when no already-accepted
/// point has them inside its n-ring. Idempotent; output is pairwise
/// n-ring-separated.
DistortionPointSet post_filter(const DistortionPointSet& points, const MeshTopology& topo,
                               int n);

}  // namespace dpoint
