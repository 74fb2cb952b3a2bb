#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dpoint/param.hpp"
#include "dpoint/trimesh.hpp"

namespace dpoint {

/// Objectives handled by the optimizer. All are sums over triangles of
/// w_t * g(J_t):
///   AmipsConformal:  w = 1,       g = exp(E_MIPS)   (conformal detection map)
///   IsoExpArea:      w = area_t,  g = exp(E_iso)    (final isometric map)
///   MipsSum:         w = 1,       g = E_MIPS        (overflow-safe pre-pass)
///   IsoSumArea:      w = area_t,  g = E_iso         (overflow-safe pre-pass)
enum class EnergyKind { AmipsConformal, IsoExpArea, MipsSum, IsoSumArea };

/// Per-triangle value/gradient/Hessian of w*g(J) with respect to the three
/// uv corners (order u0x,u0y,u1x,u1y,u2x,u2y). Hessian is projected to PSD.
struct TriDerivatives {
    double value = 0.0;
    Eigen::Matrix<double, 6, 1> grad = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 6> hess = Eigen::Matrix<double, 6, 6>::Zero();
};

TriDerivatives tri_energy_derivatives(const LocalFrame& frame, const Vec2& u0,
                                      const Vec2& u1, const Vec2& u2, EnergyKind kind,
                                      bool want_hessian);

/// Total energy over all triangles; +inf if any triangle is flipped.
/// The OpenMP version buffers per-triangle values and reduces serially, so
/// the result is bit-identical for any thread count.
double total_energy(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                    const PlanarParam& uv, EnergyKind kind);
double total_energy_serial(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                           const PlanarParam& uv, EnergyKind kind);

/// Energy and its gradient with respect to all uv coordinates
/// (vertex v occupies entries 2v, 2v+1). Same determinism guarantee.
double energy_gradient(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                       const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad);
double energy_gradient_serial(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                              const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad);

/// Energy, gradient, and PSD-projected Hessian (as triplets) in one pass.
double energy_gradient_hessian(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                               const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad,
                               std::vector<Eigen::Triplet<double>>& triplets);

}  // namespace dpoint
