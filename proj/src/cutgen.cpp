#include "dpoint/cutgen.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace dpoint {

int CutResult::num_filled() const {
    return static_cast<int>(std::count(filled.begin(), filled.end(), char(1)));
}

int farthest_vertex(const TriMesh& mesh, int from) {
    if (from < 0 || from >= mesh.num_vertices())
        throw std::runtime_error("farthest_vertex: invalid vertex index");
    const Vec3& p = mesh.vertices[from];
    int best = from;
    double best_d2 = -1.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double d2 = (mesh.vertices[v] - p).squaredNorm();
        if (d2 > best_d2) {
            best_d2 = d2;
            best = v;
        }
    }
    return best;
}

DijkstraResult dijkstra(const TriMesh& mesh, const MeshTopology& topo, int source) {
    const int nv = mesh.num_vertices();
    DijkstraResult r;
    r.dist.assign(nv, std::numeric_limits<double>::infinity());
    r.pred.assign(nv, -1);
    r.dist[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > r.dist[u]) continue;
        for (int w : topo.vertex_neighbors(u)) {
            const double nd = d + (mesh.vertices[u] - mesh.vertices[w]).norm();
            if (nd < r.dist[w]) {
                r.dist[w] = nd;
                r.pred[w] = u;
                pq.emplace(nd, w);
            }
        }
    }
    return r;
}

EdgePath shortest_edge_path(const TriMesh& mesh, const MeshTopology& topo, int a, int b) {
    if (a == b)
        throw std::runtime_error("shortest_edge_path: identical endpoints");
    const auto r = dijkstra(mesh, topo, a);
    if (!std::isfinite(r.dist[b]))
        throw std::runtime_error("shortest_edge_path: endpoints not connected");
    EdgePath path;
    for (int v = b; v != -1; v = r.pred[v]) path.vertices.push_back(v);
    std::reverse(path.vertices.begin(), path.vertices.end());
    return path;
}

EdgePath shortest_edge_path(const TriMesh& mesh, int a, int b) {
    return shortest_edge_path(mesh, MeshTopology(mesh), a, b);
}

namespace {

/// Remaps a path on a derived mesh to source-mesh indices via origin.
EdgePath to_source_indices(const TriMesh& mesh, const EdgePath& path) {
    EdgePath out = path;
    for (int& v : out.vertices) v = mesh.origin_of(v);
    return out;
}

}  // namespace

CutResult random_genus0_cut(const TriMesh& mesh, RngStream& rng) {
    const MeshTopology topo(mesh);
    if (topo.genus() != 0)
        throw std::runtime_error("random_genus0_cut: mesh is not genus zero");
    const int vi = rng.uniform_index(mesh.num_vertices());
    const int vj = farthest_vertex(mesh, vi);
    const EdgePath path = shortest_edge_path(mesh, topo, vi, vj);

    CutResult result;
    result.disk = cut_along(mesh, path);
    result.cut_paths.push_back(to_source_indices(mesh, path));
    result.filled.assign(result.disk.num_triangles(), 0);
    result.cut_length = path.length(mesh);
    return result;
}

std::vector<EdgePath> handle_loops(const TriMesh& mesh, RngStream* rng, double rho) {
    const MeshTopology topo(mesh);
    const int g = topo.genus();
    if (g == 0) return {};

    const int nv = mesh.num_vertices();
    const int ne = topo.num_edges();
    const int nt = topo.num_triangles();

    std::vector<double> weight(ne);
    for (int e = 0; e < ne; ++e) {
        const MeshEdge& edge = topo.edges()[e];
        const double len = (mesh.vertices[edge.a] - mesh.vertices[edge.b]).norm();
        const double factor = rng ? rng->uniform_real(1.0, 1.0 + rho) : 1.0;
        weight[e] = len * factor;
    }

    // Primal shortest-path tree from a (possibly random) root.
    const int root = rng ? rng->uniform_index(nv) : 0;
    std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
    std::vector<int> pred(nv, -1), pred_edge(nv, -1);
    dist[root] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.emplace(0.0, root);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (int w : topo.vertex_neighbors(u)) {
            const int e = topo.edge_between(u, w);
            const double nd = d + weight[e];
            if (nd < dist[w]) {
                dist[w] = nd;
                pred[w] = u;
                pred_edge[w] = e;
                pq.emplace(nd, w);
            }
        }
    }
    std::vector<char> in_tree(ne, 0);
    for (int v = 0; v < nv; ++v)
        if (pred_edge[v] >= 0) in_tree[pred_edge[v]] = 1;

    // Dual spanning tree over triangles through edges not in the primal tree.
    std::vector<char> crossed(ne, 0), visited(nt, 0);
    std::vector<int> stack{0};
    visited[0] = 1;
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int e = topo.edge_between(tri[k], tri[(k + 1) % 3]);
            const MeshEdge& edge = topo.edges()[e];
            if (in_tree[e] || edge.boundary()) continue;
            const int other = edge.tri[0] == t ? edge.tri[1] : edge.tri[0];
            if (!visited[other]) {
                visited[other] = 1;
                crossed[e] = 1;
                stack.push_back(other);
            }
        }
    }

    auto tree_path_to_root = [&](int v) {
        std::vector<int> path;
        for (; v != -1; v = pred[v]) path.push_back(v);
        return path;  // v .. root
    };

    std::vector<EdgePath> loops;
    for (int e = 0; e < ne; ++e) {
        if (in_tree[e] || crossed[e] || topo.edges()[e].boundary()) continue;
        auto pu = tree_path_to_root(topo.edges()[e].a);
        auto pv = tree_path_to_root(topo.edges()[e].b);
        // strip the shared suffix, keeping the lowest common ancestor once
        while (pu.size() >= 2 && pv.size() >= 2 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
            pu.pop_back();
            pv.pop_back();
        }
        EdgePath loop;
        loop.closed = true;
        loop.vertices.assign(pu.begin(), pu.end());  // a .. lca
        for (auto it = pv.rbegin() + 1; it != pv.rend(); ++it)
            loop.vertices.push_back(*it);  // lca(excluded) .. b
        loops.push_back(std::move(loop));
    }
    if (static_cast<int>(loops.size()) != 2 * g)
        throw std::runtime_error("handle_loops: tree-cotree rank mismatch");
    return loops;
}

CutResult to_disk(const TriMesh& mesh, RngStream& rng, double rho) {
    CutResult result;
    TriMesh work = mesh;
    std::vector<char> filled;  // per triangle of `work`
    filled.assign(work.num_triangles(), 0);

    MeshTopology topo(work);
    int guard = 0;
    while (topo.genus() > 0) {
        if (++guard > 16)
            throw std::runtime_error("to_disk: failed to reach genus zero");
        auto loops = handle_loops(work, &rng, rho);
        // greedy vertex-disjoint subset; loops sharing vertices wait for the
        // next round on the refilled mesh
        std::vector<EdgePath> chosen;
        std::unordered_set<int> used;
        for (auto& loop : loops) {
            bool disjoint = true;
            for (int v : loop.vertices)
                if (used.count(v)) {
                    disjoint = false;
                    break;
                }
            if (!disjoint) continue;
            for (int v : loop.vertices) used.insert(v);
            result.cut_paths.push_back(to_source_indices(work, loop));
            result.cut_length += loop.length(work);
            chosen.push_back(std::move(loop));
        }
        work = cut_along(work, chosen);  // triangle indices unchanged
        FillResult fr = fill_holes(work);
        work = std::move(fr.mesh);
        filled.resize(work.num_triangles(), 0);
        for (int t : fr.filled_triangles) filled[t] = 1;
        topo = MeshTopology(work);
    }

    const int vi = rng.uniform_index(work.num_vertices());
    const int vj = farthest_vertex(work, vi);
    const EdgePath path = shortest_edge_path(work, topo, vi, vj);
    result.cut_paths.push_back(to_source_indices(work, path));
    result.cut_length += path.length(work);
    result.disk = cut_along(work, path);  // origin composes back to `mesh`
    result.filled = std::move(filled);    // cut_along preserves triangle indices
    return result;
}

}  // namespace dpoint
