#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpoint/cutgen.hpp"
#include "dpoint/detect.hpp"
#include "dpoint/optimize.hpp"
#include "dpoint/simplify.hpp"
#include "dpoint/vote.hpp"

namespace dpoint {

struct PipelineConfig {
    std::uint64_t seed = 0;
    int runs = 10;             // R candidate generation runs
    int min_votes = 3;
    int n_ring = 5;
    double e_th = 2.0;         // first-iteration distortion filter
    int nv_thres = 13000;      // simplification cap
    std::optional<int> region_n;  // overrides the 0.1% rule when set
    OptimizerConfig optimizer;
    bool simplify = true;
    double rho = 0.5;          // handle-loop edge-weight perturbation
    int threads = 0;           // 0: all available (DP_THREADS caps this)
};

struct RunDiagnostics {
    int run = 0;
    bool ok = false;
    std::string error;
    int num_candidates = 0;
    double final_energy = 0.0;
    int iterations = 0;
};

struct DetectResult {
    DistortionPointSet points;
    std::vector<RunDiagnostics> runs;
    bool simplified = false;
    double detect_ms = 0.0;
};

/// Full detection pipeline: optional QEM simplification, R independent
/// cut/flatten/cluster runs (executed in parallel, joined deterministically
/// by run index), voting, post-filtering, and mapping back to the input
/// mesh. Deterministic for a fixed (seed, config). Throws if fewer than
/// ceil(R/2) runs succeed.
DetectResult detect_points(const TriMesh& mesh, const PipelineConfig& cfg);

/// Cut through the distortion points: minimum spanning tree over the
/// complete point graph with shortest-edge-path distances, realized on mesh
/// edges and reduced to a tree (genus 0). For higher genus the (unperturbed)
/// handle loops join the cut first. A single point is extended by the path
/// to its farthest vertex; zero points fall back to a random cut.
std::vector<EdgePath> mst_cut(const TriMesh& mesh, const DistortionPointSet& points,
                              std::uint64_t seed = 0);

struct DistortionReport {
    std::vector<double> per_triangle;  // E_iso, hole fills excluded
    double delta_avg = 0.0;
    double delta_max = 0.0;
    double delta_std = 0.0;
    double cut_length_ratio = 0.0;
    int n_triangles = 0;
    std::map<std::string, double> timings_ms;
};

struct FinalParam {
    TriMesh disk;           // cut-open mesh, origin indices into the input
    PlanarParam uv;
    DistortionReport report;
};

/// Cuts along the given paths, runs Tutte + area-weighted exponential
/// isometric optimization, and reports the distortion statistics.
FinalParam final_parameterize(const TriMesh& mesh, const std::vector<EdgePath>& cut,
                              const PipelineConfig& cfg);

/// JSON serialization (stable key order, for byte-reproducible output).
std::string points_to_json(const DistortionPointSet& points, const TriMesh& mesh,
                           const PipelineConfig& cfg, bool simplified);
std::string report_to_json(const DistortionReport& report, bool include_timings);

}  // namespace dpoint
