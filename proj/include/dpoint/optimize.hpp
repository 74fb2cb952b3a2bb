#pragma once

#include <vector>

#include "dpoint/energy_kernels.hpp"
#include "dpoint/param.hpp"

namespace dpoint {

struct OptimizerConfig {
    double tol = 1e-6;        // relative energy decrease stopping threshold
    int max_iters = 500;
    double ls_shrink = 0.5;   // line-search backtracking factor
    int ls_max_steps = 64;
};

enum class OptimizeStatus { Converged, MaxIters, LineSearchStalled };

struct OptimizeResult {
    PlanarParam uv;
    std::vector<double> energy_trace;  // energy after every accepted iterate,
                                       // starting with the initial energy
    OptimizeStatus status = OptimizeStatus::Converged;
    int iterations = 0;
};

/// Flip-free minimization of the chosen energy by projected Newton descent:
/// per-triangle PSD-projected Hessians, sparse LDLT solve, and a line search
/// whose initial step is capped at 0.8x the first step that would collapse
/// any triangle (det J(alpha) = 0). Every accepted iterate is flip-free and
/// the energy trace is monotone non-increasing. Throws if `init` contains a
/// flipped triangle.
OptimizeResult minimize_energy(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                               const PlanarParam& init, EnergyKind kind,
                               const OptimizerConfig& cfg);

/// ACAP conformal optimization (AMIPS objective). When exp(E_MIPS) overflows
/// at the initial point, a MIPS-sum pre-pass first brings the iterate into
/// the representable range.
OptimizeResult optimize_acap(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                             const PlanarParam& init, const OptimizerConfig& cfg);

}  // namespace dpoint
