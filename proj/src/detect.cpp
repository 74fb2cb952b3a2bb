#include "dpoint/detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace dpoint {

DistortionField make_distortion_field(const JacobianField& jac,
                                      const std::vector<char>& filled) {
    DistortionField field;
    field.e_iso.resize(jac.size());
    field.masked.assign(jac.size(), 0);
    for (int t = 0; t < jac.size(); ++t) {
        field.e_iso[t] = iso_distortion(jac.J[t]);
        if (!filled.empty() && filled[t]) field.masked[t] = 1;
        if (!std::isfinite(field.e_iso[t])) field.masked[t] = 1;  // flipped: excluded
    }
    return field;
}

namespace {

/// Edge-connected components of `keep` triangles; each component sorted.
std::vector<std::vector<int>> group_regions(const std::vector<int>& keep,
                                            const MeshTopology& topo) {
    std::unordered_map<int, int> comp;
    comp.reserve(keep.size());
    for (int t : keep) comp[t] = -1;
    std::vector<std::vector<int>> regions;
    for (int t : keep) {
        if (comp[t] >= 0) continue;
        std::vector<int> region;
        std::deque<int> queue{t};
        comp[t] = static_cast<int>(regions.size());
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            region.push_back(u);
            for (int w : topo.triangle_neighbors(u)) {
                auto it = comp.find(w);
                if (it != comp.end() && it->second < 0) {
                    it->second = comp[t];
                    queue.push_back(w);
                }
            }
        }
        std::sort(region.begin(), region.end());
        regions.push_back(std::move(region));
    }
    return regions;
}

int argmax_triangle(const std::vector<int>& region, const DistortionField& field) {
    int best = region[0];
    for (int t : region)
        if (field.e_iso[t] > field.e_iso[best]) best = t;  // ties: smallest index wins
    return best;
}

double lower_median(std::vector<double> values) {
    const std::size_t k = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + k, values.end());
    return values[k];
}

}  // namespace

std::vector<int> detect_distortion_triangles(const DistortionField& field,
                                             const MeshTopology& topo, int region_n,
                                             double e_th) {
    if (region_n < 1)
        throw std::runtime_error("detect: region threshold must be >= 1");

    // first pass: E_iso >= e_th filter seeds the queue
    std::vector<int> keep;
    for (int t = 0; t < field.size(); ++t)
        if (!field.masked[t] && field.e_iso[t] >= e_th) keep.push_back(t);

    std::deque<std::vector<int>> queue;
    std::set<int> distortion_tris;
    for (auto& region : group_regions(keep, topo)) {
        if (static_cast<int>(region.size()) >= region_n) {
            distortion_tris.insert(argmax_triangle(region, field));
            queue.push_back(std::move(region));
        }
    }

    while (!queue.empty()) {
        std::vector<int> region = std::move(queue.front());
        queue.pop_front();
        distortion_tris.insert(argmax_triangle(region, field));

        std::vector<double> values;
        values.reserve(region.size());
        for (int t : region) values.push_back(field.e_iso[t]);
        const double median = lower_median(std::move(values));

        std::vector<int> kept;
        for (int t : region)
            if (field.e_iso[t] >= median) kept.push_back(t);
        if (kept.size() == region.size()) continue;  // constant plateau, nothing to split

        for (auto& sub : group_regions(kept, topo))
            if (static_cast<int>(sub.size()) >= region_n) queue.push_back(std::move(sub));
    }
    return {distortion_tris.begin(), distortion_tris.end()};
}

CandidateSet triangles_to_candidates(const std::vector<int>& tris,
                                     const DistortionField& field, const TriMesh& disk,
                                     const MeshTopology& topo) {
    CandidateSet out;
    std::set<int> seen;
    for (int t : tris) {
        const auto& tri = disk.triangles[t];
        int best_vertex = -1;
        int best_origin = -1;
        double best_sum = -1.0;
        for (int corner : tri) {
            const int origin = disk.origin_of(corner);
            if (origin < 0) continue;  // hole-fill centroid, not a real vertex
            double sum = 0.0;
            for (int adj : topo.vertex_triangles(corner))
                if (!field.masked[adj]) sum += field.e_iso[adj];
            if (sum > best_sum || (sum == best_sum && origin < best_origin)) {
                best_sum = sum;
                best_vertex = corner;
                best_origin = origin;
            }
        }
        if (best_vertex < 0) continue;  // triangle entirely on a filled region
        if (seen.insert(best_origin).second)
            out.push_back({best_origin, field.e_iso[t]});
    }
    return out;
}

int region_threshold(int num_vertices, int simplify_cap) {
    if (num_vertices < 4)
        throw std::runtime_error("region_threshold: need at least 4 vertices");
    const int base = std::min(num_vertices, simplify_cap);
    return std::max(1, static_cast<int>(std::llround(0.001 * base)));
}

}  // namespace dpoint
