#include "dpoint/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace dpoint {

namespace {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

Mat4 plane_quadric(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
    Vec3 n = (p1 - p0).cross(p2 - p0);
    const double len = n.norm();
    if (len < 1e-300) return Mat4::Zero();
    n /= len;
    Vec4 plane(n.x(), n.y(), n.z(), -n.dot(p0));
    // area-weighted fundamental quadric
    return 0.5 * len * plane * plane.transpose();
}

double quadric_cost(const Mat4& Q, const Vec3& p) {
    const Vec4 x(p.x(), p.y(), p.z(), 1.0);
    return x.dot(Q * x);
}

struct HeapEntry {
    double cost;
    int a, b;        // a < b
    long stamp;      // sum of endpoint versions at push time
    bool operator>(const HeapEntry& o) const {
        if (cost != o.cost) return cost > o.cost;
        if (a != o.a) return a > o.a;
        return b > o.b;
    }
};

class Simplifier {
public:
    Simplifier(const TriMesh& mesh, int target) : mesh_(mesh), target_(target) {
        const int nv = mesh.num_vertices();
        const int nt = mesh.num_triangles();
        pos_ = mesh.vertices;
        tris_ = mesh.triangles;
        tri_alive_.assign(nt, 1);
        vert_alive_.assign(nv, 1);
        version_.assign(nv, 0);
        quadric_.assign(nv, Mat4::Zero());
        vtris_.resize(nv);
        for (int t = 0; t < nt; ++t) {
            const auto& tri = tris_[t];
            const Mat4 K = plane_quadric(pos_[tri[0]], pos_[tri[1]], pos_[tri[2]]);
            for (int v : tri) {
                quadric_[v] += K;
                vtris_[v].push_back(t);
            }
        }
        alive_count_ = nv;
    }

    SimplifyResult run() {
        std::set<std::pair<int, int>> edges;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
            for (int k = 0; k < 3; ++k) {
                int a = tris_[t][k], b = tris_[t][(k + 1) % 3];
                edges.emplace(std::min(a, b), std::max(a, b));
            }
        for (auto [a, b] : edges) push_edge(a, b);

        while (alive_count_ > target_ && !heap_.empty()) {
            const HeapEntry e = heap_.top();
            heap_.pop();
            if (!vert_alive_[e.a] || !vert_alive_[e.b]) continue;
            if (e.stamp != version_[e.a] + version_[e.b]) continue;  // stale
            try_collapse(e.a, e.b);
        }

        SimplifyResult result;
        result.target = target_;
        result.reached_target = alive_count_ <= target_;
        std::vector<int> remap(pos_.size(), -1);
        for (std::size_t v = 0; v < pos_.size(); ++v) {
            if (vert_alive_[v]) {
                remap[v] = result.mesh.num_vertices();
                result.mesh.vertices.push_back(pos_[v]);
            }
        }
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            if (!tri_alive_[t]) continue;
            result.mesh.triangles.push_back(
                {remap[tris_[t][0]], remap[tris_[t][1]], remap[tris_[t][2]]});
        }
        return result;
    }

private:
    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (int t : vtris_[v]) {
            if (!tri_alive_[t]) continue;
            for (int u : tris_[t])
                if (u != v) out.push_back(u);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    Vec3 optimal_position(int a, int b, const Mat4& Q) const {
        Eigen::Matrix3d A = Q.topLeftCorner<3, 3>();
        Vec3 rhs = -Q.topRightCorner<3, 1>();
        Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
        if (lu.isInvertible()) {
            Vec3 x = lu.solve(rhs);
            if (x.allFinite()) return x;
        }
        const Vec3 mid = 0.5 * (pos_[a] + pos_[b]);
        Vec3 best = pos_[a];
        double best_cost = quadric_cost(Q, pos_[a]);
        for (const Vec3& c : {pos_[b], mid}) {
            const double cost = quadric_cost(Q, c);
            if (cost < best_cost) {
                best_cost = cost;
                best = c;
            }
        }
        return best;
    }

    void push_edge(int a, int b) {
        if (a > b) std::swap(a, b);
        const Mat4 Q = quadric_[a] + quadric_[b];
        const Vec3 p = optimal_position(a, b, Q);
        heap_.push({quadric_cost(Q, p), a, b, version_[a] + version_[b]});
    }

    bool link_condition(int a, int b) const {
        // shared triangles give the two opposite vertices; any extra common
        // neighbor would pinch the surface or change genus
        std::set<int> opposite;
        int shared = 0;
        for (int t : vtris_[a]) {
            if (!tri_alive_[t]) continue;
            const auto& tri = tris_[t];
            if (tri[0] == b || tri[1] == b || tri[2] == b) {
                ++shared;
                for (int u : tri)
                    if (u != a && u != b) opposite.insert(u);
            }
        }
        if (shared != 2) return false;  // closed manifold interior edge expected
        const auto na = neighbors(a);
        const auto nb = neighbors(b);
        std::vector<int> common;
        std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                              std::back_inserter(common));
        return common.size() == opposite.size() &&
               std::equal(common.begin(), common.end(), opposite.begin());
    }

    bool normals_ok(int a, int b, const Vec3& p) const {
        for (int v : {a, b}) {
            for (int t : vtris_[v]) {
                if (!tri_alive_[t]) continue;
                const auto& tri = tris_[t];
                const bool dies = (tri[0] == a || tri[1] == a || tri[2] == a) &&
                                  (tri[0] == b || tri[1] == b || tri[2] == b);
                if (dies) continue;
                Vec3 q[3], r[3];
                for (int k = 0; k < 3; ++k) {
                    q[k] = pos_[tri[k]];
                    r[k] = (tri[k] == a || tri[k] == b) ? p : pos_[tri[k]];
                }
                const Vec3 n0 = (q[1] - q[0]).cross(q[2] - q[0]);
                const Vec3 n1 = (r[1] - r[0]).cross(r[2] - r[0]);
                if (n0.dot(n1) <= 0.0 || n1.squaredNorm() < 1e-300) return false;
            }
        }
        return true;
    }

    void try_collapse(int a, int b) {
        if (!link_condition(a, b)) return;
        const Mat4 Q = quadric_[a] + quadric_[b];
        const Vec3 p = optimal_position(a, b, Q);
        if (!normals_ok(a, b, p)) return;

        // collapse b into a
        pos_[a] = p;
        quadric_[a] = Q;
        for (int t : vtris_[b]) {
            if (!tri_alive_[t]) continue;
            auto& tri = tris_[t];
            const bool has_a = tri[0] == a || tri[1] == a || tri[2] == a;
            if (has_a) {
                tri_alive_[t] = 0;
            } else {
                for (int& v : tri)
                    if (v == b) v = a;
                vtris_[a].push_back(t);
            }
        }
        vert_alive_[b] = 0;
        --alive_count_;
        ++version_[a];
        ++version_[b];
        // drop dead incidences lazily but keep vtris_[a] tidy
        auto& ta = vtris_[a];
        ta.erase(std::remove_if(ta.begin(), ta.end(), [&](int t) { return !tri_alive_[t]; }),
                 ta.end());
        // only edges touching a changed cost: quadrics and positions of the
        // other ring vertices are untouched, so their heap entries stay valid
        for (int u : neighbors(a)) push_edge(a, u);
    }

    const TriMesh& mesh_;
    int target_;
    std::vector<Vec3> pos_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<char> tri_alive_, vert_alive_;
    std::vector<long> version_;
    std::vector<Mat4> quadric_;
    std::vector<std::vector<int>> vtris_;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap_;
    int alive_count_ = 0;
};

}  // namespace

SimplifyResult qem_simplify(const TriMesh& mesh, int target) {
    if (target < 4)
        throw std::runtime_error("qem_simplify: target must be >= 4");
    {
        MeshTopology topo(mesh);
        if (!topo.is_closed())
            throw std::runtime_error("qem_simplify: mesh must be closed");
    }
    if (mesh.num_vertices() <= target) {
        SimplifyResult r;
        r.mesh = mesh;
        r.mesh.origin.clear();
        r.target = target;
        r.reached_target = true;
        return r;
    }
    SimplifyResult r = Simplifier(mesh, target).run();
    MeshTopology check(r.mesh);  // collapse bookkeeping must preserve manifoldness
    (void)check;
    return r;
}

namespace {

struct HashGrid {
    double cell;
    Vec3 origin;
    std::unordered_map<std::uint64_t, std::vector<int>> cells;

    std::uint64_t key(long ix, long iy, long iz) const {
        const std::uint64_t h = static_cast<std::uint64_t>(ix) * 73856093ULL ^
                                static_cast<std::uint64_t>(iy) * 19349663ULL ^
                                static_cast<std::uint64_t>(iz) * 83492791ULL;
        return h;
    }
    std::array<long, 3> coords(const Vec3& p) const {
        return {static_cast<long>(std::floor((p.x() - origin.x()) / cell)),
                static_cast<long>(std::floor((p.y() - origin.y()) / cell)),
                static_cast<long>(std::floor((p.z() - origin.z()) / cell))};
    }
};

}  // namespace

int nearest_vertex(const TriMesh& mesh, const Vec3& query) {
    const int nv = mesh.num_vertices();
    if (nv == 0) throw std::runtime_error("nearest_vertex: empty mesh");
    double cell = mesh.mean_edge_length();
    if (!(cell > 0.0)) cell = 1.0;

    HashGrid grid;
    grid.cell = cell;
    grid.origin = mesh.vertices[0];
    for (int v = 0; v < nv; ++v) {
        const auto c = grid.coords(mesh.vertices[v]);
        grid.cells[grid.key(c[0], c[1], c[2])].push_back(v);
    }

    const auto qc = grid.coords(query);
    long max_ring = 0;
    {
        std::array<long, 3> lo = qc, hi = qc;
        for (int v = 0; v < nv; ++v) {
            const auto c = grid.coords(mesh.vertices[v]);
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], c[k]);
                hi[k] = std::max(hi[k], c[k]);
            }
        }
        for (int k = 0; k < 3; ++k)
            max_ring = std::max({max_ring, qc[k] - lo[k], hi[k] - qc[k]});
    }
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (long ring = 0; ring <= max_ring; ++ring) {
        for (long dx = -ring; dx <= ring; ++dx)
            for (long dy = -ring; dy <= ring; ++dy)
                for (long dz = -ring; dz <= ring; ++dz) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring)
                        continue;  // shell only
                    auto it = grid.cells.find(grid.key(qc[0] + dx, qc[1] + dy, qc[2] + dz));
                    if (it == grid.cells.end()) continue;
                    for (int v : it->second) {
                        const double d2 = (mesh.vertices[v] - query).squaredNorm();
                        if (d2 < best_d2 || (d2 == best_d2 && v < best)) {
                            best_d2 = d2;
                            best = v;
                        }
                    }
                }
        // certified once the closest possible point in the next shell is
        // farther than the current best
        if (best >= 0) {
            const double safe = static_cast<double>(ring) * cell;
            if (best_d2 <= safe * safe) break;
        }
    }
    return best;
}

DistortionPointSet map_back(const DistortionPointSet& points, const TriMesh& simplified,
                            const TriMesh& original) {
    std::map<int, int> merged;  // original vertex -> max votes
    for (const auto& p : points.points) {
        const int target = nearest_vertex(original, simplified.vertices[p.vertex]);
        auto [it, inserted] = merged.emplace(target, p.votes);
        if (!inserted) it->second = std::max(it->second, p.votes);
    }
    DistortionPointSet out;
    for (const auto& [vertex, votes] : merged) out.points.push_back({vertex, votes});
    return out;
}

}  // namespace dpoint
