#include "dpoint/cut.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace dpoint {

double EdgePath::length(const TriMesh& mesh) const {
    double len = 0.0;
    const int ne = num_edges();
    for (int i = 0; i < ne; ++i) {
        const int a = vertices[i];
        const int b = vertices[(i + 1) % vertices.size()];
        len += (mesh.vertices[a] - mesh.vertices[b]).norm();
    }
    return len;
}

void validate_path(const MeshTopology& topo, const EdgePath& path) {
    const auto& vs = path.vertices;
    if (path.closed) {
        if (vs.size() < 3)
            throw std::runtime_error("path: closed loop needs >= 3 vertices");
    } else {
        if (vs.size() < 2)
            throw std::runtime_error("path: open path needs >= 2 vertices");
    }
    std::unordered_set<int> seen(vs.begin(), vs.end());
    if (seen.size() != vs.size())
        throw std::runtime_error("path: self-intersecting path");
    const int ne = path.num_edges();
    for (int i = 0; i < ne; ++i) {
        const int a = vs[i], b = vs[(i + 1) % vs.size()];
        if (topo.edge_between(a, b) < 0)
            throw std::runtime_error("path: consecutive vertices do not share an edge");
    }
}

namespace {

TriMesh cut_impl(const TriMesh& mesh, const MeshTopology& topo,
                 const std::set<std::pair<int, int>>& cut_edges) {
    auto is_cut = [&](int u, int v) {
        return cut_edges.count({std::min(u, v), std::max(u, v)}) > 0;
    };

    std::vector<int> cut_vertices;
    {
        std::unordered_set<int> vs;
        for (const auto& [a, b] : cut_edges) {
            vs.insert(a);
            vs.insert(b);
        }
        cut_vertices.assign(vs.begin(), vs.end());
        std::sort(cut_vertices.begin(), cut_vertices.end());
    }

    TriMesh out;
    out.vertices = mesh.vertices;
    out.triangles = mesh.triangles;
    out.origin.resize(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) out.origin[v] = mesh.origin_of(v);

    // Per cut vertex: group incident triangles into sectors connected across
    // non-cut edges; sector 0 keeps the vertex, later sectors get fresh copies.
    for (int v : cut_vertices) {
        const auto& tris = topo.vertex_triangles(v);
        const int n = static_cast<int>(tris.size());
        std::vector<int> sector(n, -1);
        int num_sectors = 0;
        for (int s = 0; s < n; ++s) {
            if (sector[s] >= 0) continue;
            sector[s] = num_sectors;
            std::vector<int> stack{s};
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                const auto& tri_i = mesh.triangles[tris[i]];
                for (int j = 0; j < n; ++j) {
                    if (sector[j] >= 0) continue;
                    const auto& tri_j = mesh.triangles[tris[j]];
                    for (int u : tri_i) {
                        if (u == v) continue;
                        if ((u == tri_j[0] || u == tri_j[1] || u == tri_j[2]) &&
                            topo.edge_between(v, u) >= 0 && !is_cut(v, u)) {
                            sector[j] = num_sectors;
                            stack.push_back(j);
                            break;
                        }
                    }
                }
            }
            ++num_sectors;
        }
        for (int s = 1; s < num_sectors; ++s) {
            const int copy = out.num_vertices();
            out.vertices.push_back(mesh.vertices[v]);
            out.origin.push_back(mesh.origin_of(v));
            for (int i = 0; i < n; ++i) {
                if (sector[i] != s) continue;
                for (int& c : out.triangles[tris[i]])
                    if (c == v) c = copy;
            }
        }
    }
    return out;
}

}  // namespace

TriMesh cut_along(const TriMesh& mesh, std::span<const EdgePath> paths) {
    const MeshTopology topo(mesh);
    std::set<std::pair<int, int>> cut_edges;  // (min,max) vertex pairs
    for (const EdgePath& path : paths) {
        validate_path(topo, path);
        const int ne = path.num_edges();
        for (int i = 0; i < ne; ++i) {
            int a = path.vertices[i];
            int b = path.vertices[(i + 1) % path.vertices.size()];
            if (topo.edges()[topo.edge_between(a, b)].boundary())
                throw std::runtime_error("cut: path runs along a boundary edge");
            cut_edges.emplace(std::min(a, b), std::max(a, b));
        }
    }
    return cut_impl(mesh, topo, cut_edges);
}

TriMesh cut_along(const TriMesh& mesh, const EdgePath& path) {
    return cut_along(mesh, std::span<const EdgePath>(&path, 1));
}

TriMesh cut_along_edges(const TriMesh& mesh, const std::vector<std::pair<int, int>>& edges) {
    const MeshTopology topo(mesh);
    std::set<std::pair<int, int>> cut_edges;
    for (auto [a, b] : edges) {
        const int e = topo.edge_between(a, b);
        if (e < 0)
            throw std::runtime_error("cut: vertex pair is not a mesh edge");
        if (topo.edges()[e].boundary())
            throw std::runtime_error("cut: edge lies on the boundary");
        cut_edges.emplace(std::min(a, b), std::max(a, b));
    }
    return cut_impl(mesh, topo, cut_edges);
}

FillResult fill_holes(const TriMesh& mesh) {
    const MeshTopology topo(mesh);
    const auto loops = topo.boundary_loops();
    if (loops.empty())
        throw std::runtime_error("fill_holes: mesh is already closed");

    FillResult result;
    result.mesh = mesh;
    if (!result.mesh.has_origin()) {
        result.mesh.origin.resize(mesh.num_vertices());
        for (int v = 0; v < mesh.num_vertices(); ++v) result.mesh.origin[v] = v;
    }
    for (const auto& loop : loops) {
        if (loop.size() < 3)
            throw std::runtime_error("fill_holes: degenerate boundary loop");
        Vec3 centroid = Vec3::Zero();
        for (int v : loop) centroid += mesh.vertices[v];
        centroid /= static_cast<double>(loop.size());
        const int c = result.mesh.num_vertices();
        result.mesh.vertices.push_back(centroid);
        result.mesh.origin.push_back(-1);
        // boundary loops follow the interior triangles' direction, so fan
        // triangles must run the edge the opposite way: (v[i+1], v[i], c)
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            result.filled_triangles.push_back(result.mesh.num_triangles());
            result.mesh.triangles.push_back({b, a, c});
        }
    }
    return result;
}

}  // namespace dpoint
