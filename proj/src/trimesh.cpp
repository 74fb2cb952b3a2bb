#include "dpoint/trimesh.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace dpoint {

namespace {

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

double TriMesh::total_area() const {
    double area = 0.0;
    for (const auto& t : triangles) {
        const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
        const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
        area += 0.5 * e1.cross(e2).norm();
    }
    return area;
}

double TriMesh::mean_edge_length() const {
    double len = 0.0;
    std::size_t count = 0;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (a < b) {  // each undirected edge once for manifold meshes
                len += (vertices[a] - vertices[b]).norm();
                ++count;
            }
        }
    }
    return count ? len / static_cast<double>(count) : 0.0;
}

MeshTopology::MeshTopology(const TriMesh& mesh) : mesh_(&mesh) {
    const int nv = mesh.num_vertices();
    const int nt = mesh.num_triangles();
    num_triangles_ = nt;
    vertex_tris_.resize(nv);
    vertex_nbrs_.resize(nv);
    tri_nbrs_.resize(nt);

    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(static_cast<std::size_t>(nt) * 3);

    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw std::runtime_error("topology: triangle with repeated vertex");
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k];
            const int b = tri[(k + 1) % 3];
            if (a < 0 || a >= nv || b < 0 || b >= nv)
                throw std::runtime_error("topology: vertex index out of range");
            const auto dk = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
            if (!directed.emplace(dk, t).second)
                throw std::runtime_error("topology: inconsistent orientation or duplicate triangle");

            const auto key = edge_key(a, b);
            auto it = edge_index_.find(key);
            if (it == edge_index_.end()) {
                MeshEdge e;
                e.a = std::min(a, b);
                e.b = std::max(a, b);
                e.tri[0] = t;
                edge_index_.emplace(key, static_cast<int>(edges_.size()));
                edges_.push_back(e);
            } else {
                MeshEdge& e = edges_[it->second];
                if (e.tri[1] >= 0)
                    throw std::runtime_error("topology: non-manifold edge (more than 2 triangles)");
                e.tri[1] = t;
            }
        }
        for (int k = 0; k < 3; ++k) vertex_tris_[tri[k]].push_back(t);
    }

    for (int e = 0; e < num_edges(); ++e) {
        const MeshEdge& edge = edges_[e];
        vertex_nbrs_[edge.a].push_back(edge.b);
        vertex_nbrs_[edge.b].push_back(edge.a);
        if (edge.boundary()) boundary_edges_.push_back(e);
    }
    for (auto& nbrs : vertex_nbrs_) std::sort(nbrs.begin(), nbrs.end());

    for (const auto& edge : edges_) {
        if (!edge.boundary()) {
            tri_nbrs_[edge.tri[0]].push_back(edge.tri[1]);
            tri_nbrs_[edge.tri[1]].push_back(edge.tri[0]);
        }
    }
    for (auto& nbrs : tri_nbrs_) std::sort(nbrs.begin(), nbrs.end());

    // Vertex manifoldness: the incident triangles of every vertex must form a
    // single edge-connected fan.
    std::vector<int> comp;
    for (int v = 0; v < nv; ++v) {
        const auto& tris = vertex_tris_[v];
        if (tris.size() <= 1) continue;
        comp.assign(tris.size(), -1);
        std::deque<std::size_t> queue{0};
        comp[0] = 0;
        int seen = 1;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            const auto& tri_i = mesh.triangles[tris[i]];
            for (std::size_t j = 0; j < tris.size(); ++j) {
                if (comp[j] >= 0) continue;
                const auto& tri_j = mesh.triangles[tris[j]];
                // share an edge through v?
                bool share = false;
                for (int u : tri_i) {
                    if (u == v) continue;
                    if (u == tri_j[0] || u == tri_j[1] || u == tri_j[2]) {
                        if (edge_between(v, u) >= 0) share = true;
                    }
                }
                if (share) {
                    comp[j] = 0;
                    ++seen;
                    queue.push_back(j);
                }
            }
        }
        if (seen != static_cast<int>(tris.size()))
            throw std::runtime_error("topology: non-manifold vertex (pinched fan)");
    }
}

int MeshTopology::edge_between(int u, int v) const {
    auto it = edge_index_.find(edge_key(u, v));
    return it == edge_index_.end() ? -1 : it->second;
}

std::vector<std::vector<int>> MeshTopology::boundary_loops() const {
    // Following the incident triangle's own direction keeps the surface on
    // the left of the traversal (CCW around a planar disk).
    std::unordered_map<int, int> next;  // boundary vertex -> successor
    for (int e : boundary_edges_) {
        const MeshEdge& edge = edges_[e];
        const auto& tri = mesh_->triangles[edge.tri[0]];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[k], b = tri[(k + 1) % 3];
            if ((a == edge.a && b == edge.b) || (a == edge.b && b == edge.a)) {
                if (!next.emplace(a, b).second)
                    throw std::runtime_error("topology: vertex on more than one boundary edge pair");
            }
        }
    }
    std::vector<std::vector<int>> loops;
    std::unordered_map<int, bool> used;
    for (const auto& [start, succ] : next) {
        (void)succ;
        if (used[start]) continue;
        std::vector<int> loop;
        int v = start;
        do {
            loop.push_back(v);
            used[v] = true;
            auto it = next.find(v);
            if (it == next.end())
                throw std::runtime_error("topology: open boundary chain");
            v = it->second;
        } while (v != start);
        loops.push_back(std::move(loop));
    }
    return loops;
}

int MeshTopology::euler_characteristic() const {
    return num_vertices() - num_edges() + num_triangles_;
}

int MeshTopology::genus() const {
    if (!is_closed())
        throw std::runtime_error("genus: mesh has boundary");
    const int chi = euler_characteristic();
    if ((2 - chi) % 2 != 0)
        throw std::runtime_error("genus: odd Euler characteristic");
    return (2 - chi) / 2;
}

std::vector<int> n_ring(const MeshTopology& topo, int v, int n) {
    if (v < 0 || v >= topo.num_vertices())
        throw std::runtime_error("n_ring: invalid vertex index");
    if (n <= 0) return {};
    std::vector<int> depth(topo.num_vertices(), -1);
    depth[v] = 0;
    std::deque<int> queue{v};
    std::vector<int> out;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (depth[u] == n) continue;
        for (int w : topo.vertex_neighbors(u)) {
            if (depth[w] < 0) {
                depth[w] = depth[u] + 1;
                out.push_back(w);
                queue.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace dpoint
