#include "dpoint/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpoint {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int resolve_threads(const PipelineConfig& cfg) {
    int n = cfg.threads;
#ifdef _OPENMP
    if (n <= 0) n = omp_get_max_threads();
#else
    if (n <= 0) n = 1;
#endif
    if (const char* env = std::getenv("DP_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, n);
}

struct RunOutput {
    CandidateSet candidates;
    RunDiagnostics diag;
};

RunOutput candidate_run(const TriMesh& mesh, const PipelineConfig& cfg, int run, int region_n) {
    RunOutput out;
    out.diag.run = run;
    const int max_attempts = 6;  // initial try + 5 retries with shifted streams
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        try {
            RngStream rng(cfg.seed, static_cast<std::uint64_t>(run) +
                                        static_cast<std::uint64_t>(attempt) * cfg.runs);
            const CutResult cut = to_disk(mesh, rng, cfg.rho);
            const auto frames = local_frames(cut.disk);
            const PlanarParam init = tutte_embed(cut.disk);
            const OptimizeResult opt = optimize_acap(cut.disk, frames, init, cfg.optimizer);
            const JacobianField jf = jacobians(cut.disk, frames, opt.uv);
            const DistortionField field = make_distortion_field(jf, cut.filled);
            const MeshTopology disk_topo(cut.disk);
            const auto tris = detect_distortion_triangles(field, disk_topo, region_n, cfg.e_th);
            out.candidates = triangles_to_candidates(tris, field, cut.disk, disk_topo);
            out.diag.ok = true;
            out.diag.num_candidates = static_cast<int>(out.candidates.size());
            out.diag.final_energy = opt.energy_trace.back();
            out.diag.iterations = opt.iterations;
            return out;
        } catch (const std::exception& e) {
            out.diag.error = e.what();
        }
    }
    return out;
}

}  // namespace

DetectResult detect_points(const TriMesh& mesh, const PipelineConfig& cfg) {
    const auto start = Clock::now();
    {
        MeshTopology topo(mesh);
        if (!topo.is_closed())
            throw std::runtime_error("detect_points: input mesh must be closed");
    }

    DetectResult result;
    TriMesh detection_mesh = mesh;
    if (cfg.simplify && mesh.num_vertices() > cfg.nv_thres) {
        detection_mesh = qem_simplify(mesh, cfg.nv_thres).mesh;
        result.simplified = true;
    }
    const int region_n =
        cfg.region_n ? *cfg.region_n : region_threshold(mesh.num_vertices(), cfg.nv_thres);

    std::vector<RunOutput> outputs(cfg.runs);
    const int threads = resolve_threads(cfg);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (int r = 0; r < cfg.runs; ++r)
        outputs[r] = candidate_run(detection_mesh, cfg, r, region_n);
    (void)threads;

    std::vector<CandidateSet> successful;
    for (auto& o : outputs) {
        result.runs.push_back(o.diag);
        if (o.diag.ok) successful.push_back(std::move(o.candidates));
    }
    if (static_cast<int>(successful.size()) < (cfg.runs + 1) / 2)
        throw std::runtime_error("detect_points: fewer than half of the candidate runs succeeded");

    const VoteTally votes = tally(successful);
    DistortionPointSet selected = select(votes, cfg.min_votes);
    const MeshTopology det_topo(detection_mesh);
    selected = post_filter(selected, det_topo, cfg.n_ring);
    if (result.simplified) selected = map_back(selected, detection_mesh, mesh);
    result.points = std::move(selected);
    result.detect_ms = ms_since(start);
    return result;
}

namespace {

/// Decomposes an edge set (forest + optional loops) into maximal simple
/// paths and closed loops for reporting.
std::vector<EdgePath> decompose_edges(const TriMesh& mesh,
                                      std::set<std::pair<int, int>> edges) {
    std::map<int, std::vector<int>> adj;
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    auto take_edge = [&](int a, int b) {
        edges.erase({std::min(a, b), std::max(a, b)});
    };
    auto has_edge = [&](int a, int b) {
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    };

    std::vector<EdgePath> paths;
    // open chains first, starting at vertices of degree != 2
    for (const auto& [v, nbrs] : adj) {
        if (nbrs.size() == 2) continue;
        for (int first : nbrs) {
            if (!has_edge(v, first)) continue;
            EdgePath path;
            path.vertices.push_back(v);
            int prev = v, cur = first;
            take_edge(prev, cur);
            while (true) {
                path.vertices.push_back(cur);
                if (adj[cur].size() != 2) break;
                int next = -1;
                for (int w : adj[cur])
                    if (w != prev && has_edge(cur, w)) next = w;
                if (next < 0) break;
                prev = cur;
                take_edge(cur, next);
                cur = next;
            }
            if (path.vertices.back() == path.vertices.front()) {
                path.vertices.pop_back();  // cycle hanging off a junction vertex
                path.closed = true;
            }
            paths.push_back(std::move(path));
        }
    }
    // remaining edges form closed loops of degree-2 vertices
    while (!edges.empty()) {
        auto [a, b] = *edges.begin();
        EdgePath loop;
        loop.closed = true;
        loop.vertices.push_back(a);
        int prev = a, cur = b;
        take_edge(prev, cur);
        while (cur != a) {
            loop.vertices.push_back(cur);
            int next = -1;
            for (int w : adj[cur])
                if (w != prev && has_edge(cur, w)) next = w;
            if (next < 0) throw std::runtime_error("mst_cut: broken loop decomposition");
            prev = cur;
            take_edge(cur, next);
            cur = next;
        }
        paths.push_back(std::move(loop));
    }
    (void)mesh;
    return paths;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace

std::vector<EdgePath> mst_cut(const TriMesh& mesh, const DistortionPointSet& points,
                              std::uint64_t seed) {
    const MeshTopology topo(mesh);
    const int genus = topo.genus();

    std::set<std::pair<int, int>> cut_edges;
    UnionFind uf(mesh.num_vertices());
    std::vector<int> terminals;
    for (const auto& p : points.points) terminals.push_back(p.vertex);

    if (genus > 0) {
        for (const EdgePath& loop : handle_loops(mesh, nullptr, 0.0)) {
            terminals.push_back(loop.vertices.front());
            const int ne = loop.num_edges();
            for (int i = 0; i < ne; ++i) {
                const int a = loop.vertices[i];
                const int b = loop.vertices[(i + 1) % loop.vertices.size()];
                cut_edges.emplace(std::min(a, b), std::max(a, b));
                uf.unite(a, b);  // loop cycles are the allowed ones
            }
        }
    }

    if (terminals.empty()) {
        // no distortion points: fall back to a random genus-zero style cut
        RngStream rng(seed, 0x706f696e74ULL);
        terminals.push_back(rng.uniform_index(mesh.num_vertices()));
    }
    std::sort(terminals.begin(), terminals.end());
    terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());

    std::vector<EdgePath> connecting;
    if (terminals.size() == 1) {
        // a lone vertex cannot open the surface; extend to the farthest vertex
        connecting.push_back(
            shortest_edge_path(mesh, topo, terminals[0], farthest_vertex(mesh, terminals[0])));
    } else {
        // Prim MST over the complete terminal graph with shortest-path metric
        const int k = static_cast<int>(terminals.size());
        std::vector<DijkstraResult> from(k);
        for (int i = 0; i < k; ++i) from[i] = dijkstra(mesh, topo, terminals[i]);
        std::vector<char> in_tree(k, 0);
        std::vector<double> best(k, std::numeric_limits<double>::infinity());
        std::vector<int> best_src(k, -1);
        in_tree[0] = 1;
        for (int j = 1; j < k; ++j) {
            best[j] = from[0].dist[terminals[j]];
            best_src[j] = 0;
        }
        for (int added = 1; added < k; ++added) {
            int next = -1;
            for (int j = 0; j < k; ++j)
                if (!in_tree[j] && (next < 0 || best[j] < best[next])) next = j;
            if (next < 0 || !std::isfinite(best[next]))
                throw std::runtime_error("mst_cut: terminals not connected");
            in_tree[next] = 1;
            // realize the path from its MST parent
            EdgePath path;
            const auto& d = from[best_src[next]];
            for (int v = terminals[next]; v != -1; v = d.pred[v]) path.vertices.push_back(v);
            std::reverse(path.vertices.begin(), path.vertices.end());
            connecting.push_back(std::move(path));
            for (int j = 0; j < k; ++j) {
                if (!in_tree[j] && from[next].dist[terminals[j]] < best[j]) {
                    best[j] = from[next].dist[terminals[j]];
                    best_src[j] = next;
                }
            }
        }
    }

    // union the realizing paths; drop edges that would close an extra cycle
    for (const EdgePath& path : connecting) {
        for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
            const int a = path.vertices[i], b = path.vertices[i + 1];
            if (uf.unite(a, b)) cut_edges.emplace(std::min(a, b), std::max(a, b));
        }
    }
    return decompose_edges(mesh, std::move(cut_edges));
}

FinalParam final_parameterize(const TriMesh& mesh, const std::vector<EdgePath>& cut,
                              const PipelineConfig& cfg) {
    const auto t0 = Clock::now();
    std::set<std::pair<int, int>> edges;
    double cut_length = 0.0;
    for (const EdgePath& path : cut) {
        const int ne = path.num_edges();
        for (int i = 0; i < ne; ++i) {
            const int a = path.vertices[i];
            const int b = path.vertices[(i + 1) % path.vertices.size()];
            if (edges.emplace(std::min(a, b), std::max(a, b)).second)
                cut_length += (mesh.vertices[a] - mesh.vertices[b]).norm();
        }
    }

    FinalParam out;
    out.disk = cut_along_edges(mesh, {edges.begin(), edges.end()});
    {
        MeshTopology topo(out.disk);
        if (topo.euler_characteristic() != 1 || topo.boundary_loops().size() != 1)
            throw std::runtime_error("final_parameterize: cut does not open the mesh into a disk");
    }
    const auto frames = local_frames(out.disk);
    const double cut_ms = ms_since(t0);

    const auto t1 = Clock::now();
    PlanarParam uv = tutte_embed(out.disk);
    const double tutte_ms = ms_since(t1);

    const auto t2 = Clock::now();
    double energy = total_energy(out.disk, frames, uv, EnergyKind::IsoExpArea);
    if (!std::isfinite(energy)) {
        // exp(E_iso) out of range at the Tutte iterate: pre-descend the plain
        // area-weighted E_iso sum
        OptimizerConfig pre = cfg.optimizer;
        pre.max_iters = 20;
        for (int round = 0; round < 25 && !std::isfinite(energy); ++round) {
            OptimizeResult r = minimize_energy(out.disk, frames, uv, EnergyKind::IsoSumArea, pre);
            uv = std::move(r.uv);
            energy = total_energy(out.disk, frames, uv, EnergyKind::IsoExpArea);
            if (r.status != OptimizeStatus::MaxIters && !std::isfinite(energy))
                throw std::runtime_error("final_parameterize: isometric energy out of range");
        }
        if (!std::isfinite(energy))
            throw std::runtime_error("final_parameterize: isometric energy out of range");
    }
    OptimizeResult opt = minimize_energy(out.disk, frames, uv, EnergyKind::IsoExpArea,
                                         cfg.optimizer);
    out.uv = std::move(opt.uv);
    const double opt_ms = ms_since(t2);

    const JacobianField jf = jacobians(out.disk, frames, out.uv);
    DistortionReport& rep = out.report;
    rep.per_triangle.resize(jf.size());
    double sum = 0.0, sq = 0.0, mx = 0.0;
    for (int t = 0; t < jf.size(); ++t) {
        const double e = iso_distortion(jf.J[t]);
        rep.per_triangle[t] = e;
        sum += e;
        sq += e * e;
        mx = std::max(mx, e);
    }
    rep.n_triangles = jf.size();
    rep.delta_avg = sum / jf.size();
    rep.delta_max = mx;
    rep.delta_std = std::sqrt(std::max(0.0, sq / jf.size() - rep.delta_avg * rep.delta_avg));

    double total_edge_length = 0.0;
    {
        MeshTopology topo(mesh);
        for (const MeshEdge& e : topo.edges())
            total_edge_length += (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
    }
    rep.cut_length_ratio = cut_length / total_edge_length;
    rep.timings_ms["cut"] = cut_ms;
    rep.timings_ms["tutte"] = tutte_ms;
    rep.timings_ms["optimize"] = opt_ms;
    return out;
}

std::string points_to_json(const DistortionPointSet& points, const TriMesh& mesh,
                           const PipelineConfig& cfg, bool simplified) {
    nlohmann::ordered_json j;
    j["meta"] = {{"seed", cfg.seed},         {"R", cfg.runs},
                 {"min_votes", cfg.min_votes}, {"n_ring", cfg.n_ring},
                 {"E_th", cfg.e_th},          {"simplified", simplified}};
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : points.points) {
        const Vec3& pos = mesh.vertices[p.vertex];
        j["points"].push_back({{"vertex", p.vertex},
                               {"votes", p.votes},
                               {"position", {pos.x(), pos.y(), pos.z()}}});
    }
    return j.dump(2) + "\n";
}

std::string report_to_json(const DistortionReport& report, bool include_timings) {
    nlohmann::ordered_json j;
    j["delta_avg"] = report.delta_avg;
    j["delta_max"] = report.delta_max;
    j["delta_std"] = report.delta_std;
    j["cut_length_ratio"] = report.cut_length_ratio;
    j["n_triangles"] = report.n_triangles;
    if (include_timings) {
        j["timings_ms"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : report.timings_ms) j["timings_ms"][k] = v;
    }
    return j.dump(2) + "\n";
}

}  // namespace dpoint
