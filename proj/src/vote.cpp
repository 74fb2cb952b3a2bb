#include "dpoint/vote.hpp"

#include <algorithm>
#include <unordered_set>

namespace dpoint {

VoteTally tally(const std::vector<CandidateSet>& runs) {
    VoteTally t;
    t.runs = static_cast<int>(runs.size());
    for (const auto& run : runs)
        for (const auto& c : run) ++t.counts[c.vertex];
    return t;
}

DistortionPointSet select(const VoteTally& t, int min_votes) {
    DistortionPointSet out;
    for (const auto& [vertex, votes] : t.counts)
        if (votes >= min_votes) out.points.push_back({vertex, votes});
    return out;
}

DistortionPointSet post_filter(const DistortionPointSet& points, const MeshTopology& topo,
                               int n) {
    std::vector<DistortionPoint> order = points.points;
    std::sort(order.begin(), order.end(), [](const DistortionPoint& a, const DistortionPoint& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        return a.vertex < b.vertex;
    });
    DistortionPointSet out;
    std::unordered_set<int> covered;  // union of n-rings of accepted points
    for (const auto& p : order) {
        if (covered.count(p.vertex)) continue;
        out.points.push_back(p);
        for (int v : n_ring(topo, p.vertex, n)) covered.insert(v);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const DistortionPoint& a, const DistortionPoint& b) { return a.vertex < b.vertex; });
    return out;
}

}  // namespace dpoint
