#include "dpoint/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Sparse>

namespace dpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PlanarParam apply_step(const PlanarParam& uv, const Eigen::VectorXd& dir, double alpha) {
    PlanarParam out(uv.size());
    for (std::size_t v = 0; v < uv.size(); ++v)
        out[v] = uv[v] + alpha * Vec2(dir[2 * v], dir[2 * v + 1]);
    return out;
}

/// Largest step alpha such that no triangle reaches det J(alpha) = 0, scaled
/// by 0.8. det J is quadratic in alpha along a fixed direction.
double max_admissible_step(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                           const PlanarParam& uv, const Eigen::VectorXd& dir) {
    double alpha_max = kInf;
    const int nt = disk.num_triangles();
    for (int t = 0; t < nt; ++t) {
        const auto& tri = disk.triangles[t];
        Eigen::Matrix2d U, D;
        U.col(0) = uv[tri[1]] - uv[tri[0]];
        U.col(1) = uv[tri[2]] - uv[tri[0]];
        for (int k = 0; k < 2; ++k) {
            const int a = tri[k + 1], b = tri[0];
            D.col(k) = Vec2(dir[2 * a] - dir[2 * b], dir[2 * a + 1] - dir[2 * b + 1]);
        }
        const Eigen::Matrix2d J = U * frames[t].shape_inv;
        const Eigen::Matrix2d Jd = D * frames[t].shape_inv;
        const double c = J.determinant();
        const double a2 = Jd.determinant();
        const double b1 = J(0, 0) * Jd(1, 1) + Jd(0, 0) * J(1, 1) - J(0, 1) * Jd(1, 0) -
                          Jd(0, 1) * J(1, 0);
        // roots of a2*x^2 + b1*x + c = 0, c > 0
        double root = kInf;
        if (std::abs(a2) < 1e-300) {
            if (b1 < 0.0) root = -c / b1;
        } else {
            const double disc = b1 * b1 - 4.0 * a2 * c;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (b1 + (b1 >= 0.0 ? sq : -sq));
                for (double r : {q / a2, c / q}) {
                    if (r > 0.0) root = std::min(root, r);
                }
            }
        }
        alpha_max = std::min(alpha_max, root);
    }
    return 0.8 * alpha_max;
}

}  // namespace

OptimizeResult minimize_energy(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                               const PlanarParam& init, EnergyKind kind,
                               const OptimizerConfig& cfg) {
    {
        const JacobianField jf = jacobians(disk, frames, init);
        if (!(jf.min_det() > 0.0))
            throw std::runtime_error("minimize_energy: initial map contains a flipped triangle");
    }
    const int nv = disk.num_vertices();
    const int n = 2 * nv;

    OptimizeResult result;
    result.uv = init;
    result.status = OptimizeStatus::MaxIters;

    Eigen::VectorXd grad(n);
    std::vector<Eigen::Triplet<double>> triplets;
    // energy bookkeeping always goes through total_energy so the trace is
    // exactly monotone; the assembly call only provides grad/Hessian
    double energy = total_energy(disk, frames, result.uv, kind);
    energy_gradient_hessian(disk, frames, result.uv, kind, grad, triplets);
    result.energy_trace.push_back(energy);

    Eigen::SparseMatrix<double> H(n, n);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    bool analyzed = false;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const double gnorm = grad.lpNorm<Eigen::Infinity>();
        if (gnorm < 1e-12 * std::max(1.0, std::abs(energy))) {
            result.status = OptimizeStatus::Converged;
            break;
        }

        // regularized projected-Newton direction, gradient fallback
        const double reg = 1e-9 * std::max(1.0, std::abs(energy));
        for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, reg);
        H.setFromTriplets(triplets.begin(), triplets.end());
        if (!analyzed) {
            solver.analyzePattern(H);
            analyzed = true;
        }
        solver.factorize(H);
        Eigen::VectorXd dir;
        bool newton_ok = solver.info() == Eigen::Success;
        if (newton_ok) {
            dir = solver.solve(-grad);
            newton_ok = solver.info() == Eigen::Success && grad.dot(dir) < 0.0;
        }
        if (!newton_ok) dir = -grad;

        const double directional = grad.dot(dir);
        double alpha = std::min(1.0, max_admissible_step(disk, frames, result.uv, dir));
        bool accepted = false;
        for (int ls = 0; ls < cfg.ls_max_steps && alpha > 0.0; ++ls) {
            const PlanarParam trial = apply_step(result.uv, dir, alpha);
            const double trial_energy = total_energy(disk, frames, trial, kind);
            if (std::isfinite(trial_energy) &&
                trial_energy <= energy + 1e-8 * alpha * directional) {
                result.uv = trial;
                energy = trial_energy;
                accepted = true;
                break;
            }
            alpha *= cfg.ls_shrink;
        }
        if (!accepted) {
            result.status = OptimizeStatus::LineSearchStalled;
            break;
        }

        result.iterations = iter + 1;
        const double prev = result.energy_trace.back();
        result.energy_trace.push_back(energy);
        if (prev - energy < cfg.tol * std::max(std::abs(prev), 1.0)) {
            result.status = OptimizeStatus::Converged;
            break;
        }
        energy_gradient_hessian(disk, frames, result.uv, kind, grad, triplets);
    }
    return result;
}

OptimizeResult optimize_acap(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                             const PlanarParam& init, const OptimizerConfig& cfg) {
    PlanarParam start = init;
    double amips = total_energy(disk, frames, start, EnergyKind::AmipsConformal);
    if (!std::isfinite(amips)) {
        // exp(E_MIPS) overflowed somewhere; descend the plain MIPS sum until
        // the exponential becomes representable
        OptimizerConfig pre = cfg;
        pre.max_iters = 20;
        for (int round = 0; round < 25 && !std::isfinite(amips); ++round) {
            OptimizeResult r = minimize_energy(disk, frames, start, EnergyKind::MipsSum, pre);
            start = std::move(r.uv);
            amips = total_energy(disk, frames, start, EnergyKind::AmipsConformal);
            if (r.status != OptimizeStatus::MaxIters && !std::isfinite(amips))
                throw std::runtime_error("optimize_acap: AMIPS energy stays out of range");
        }
        if (!std::isfinite(amips))
            throw std::runtime_error("optimize_acap: AMIPS energy stays out of range");
    }
    return minimize_energy(disk, frames, start, EnergyKind::AmipsConformal, cfg);
}

}  // namespace dpoint
