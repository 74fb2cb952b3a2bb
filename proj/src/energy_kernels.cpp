#include "dpoint/energy_kernels.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpoint {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat46 = Eigen::Matrix<double, 4, 6>;

// vec(J) ordering is column-major: (J00, J10, J01, J11).

struct JEval {
    double value;  // g(J)
    Vec4 grad;     // dg/dvec(J)
    Mat4 hess;     // d2g/dvec(J)2, only when want_hessian
    bool finite;
};

// value/derivatives of E_MIPS = f/(2d) with f = |J|_F^2, d = det J
void mips_derivatives(const Eigen::Matrix2d& J, double& E, Vec4& gE, Mat4& hE,
                      bool want_hessian) {
    const double f = J.squaredNorm();
    const double d = J.determinant();
    const Vec4 vJ(J(0, 0), J(1, 0), J(0, 1), J(1, 1));
    const Vec4 gd(J(1, 1), -J(0, 1), -J(1, 0), J(0, 0));  // d(det)/dvec(J)
    const Vec4 gf = 2.0 * vJ;

    E = 0.5 * f / d;
    gE = vJ / d - (0.5 * f / (d * d)) * gd;
    if (want_hessian) {
        Mat4 hd = Mat4::Zero();
        hd(0, 3) = hd(3, 0) = 1.0;
        hd(1, 2) = hd(2, 1) = -1.0;
        hE = (1.0 / d) * Mat4::Identity()  // H_f/(2d) with H_f = 2I
             - (0.5 / (d * d)) * (gf * gd.transpose() + gd * gf.transpose())
             + (f / (d * d * d)) * gd * gd.transpose()
             - (0.5 * f / (d * d)) * hd;
    }
}

// value/derivatives of E_iso = (d + 1/d + f/d)/4
void iso_derivatives(const Eigen::Matrix2d& J, double& E, Vec4& gE, Mat4& hE,
                     bool want_hessian) {
    const double f = J.squaredNorm();
    const double d = J.determinant();
    const Vec4 vJ(J(0, 0), J(1, 0), J(0, 1), J(1, 1));
    const Vec4 gd(J(1, 1), -J(0, 1), -J(1, 0), J(0, 0));
    const Vec4 gf = 2.0 * vJ;
    const double id2 = 1.0 / (d * d);

    E = 0.25 * (d + 1.0 / d + f / d);
    const double c = 1.0 - id2 - f * id2;
    gE = 0.25 * (c * gd + (1.0 / d) * gf);
    if (want_hessian) {
        Mat4 hd = Mat4::Zero();
        hd(0, 3) = hd(3, 0) = 1.0;
        hd(1, 2) = hd(2, 1) = -1.0;
        const double id3 = id2 / d;
        hE = 0.25 * ((2.0 * id3 + 2.0 * f * id3) * gd * gd.transpose()
                     - id2 * (gf * gd.transpose() + gd * gf.transpose())
                     + c * hd
                     + (2.0 / d) * Mat4::Identity());
    }
}

JEval eval_g(const Eigen::Matrix2d& J, EnergyKind kind, bool want_hessian) {
    JEval r;
    r.finite = J.determinant() > 0.0;
    if (!r.finite) {
        r.value = kInf;
        return r;
    }
    double E;
    Vec4 gE;
    Mat4 hE;
    switch (kind) {
        case EnergyKind::MipsSum: {
            mips_derivatives(J, E, gE, hE, want_hessian);
            r.value = E;
            r.grad = gE;
            if (want_hessian) r.hess = hE;
            break;
        }
        case EnergyKind::AmipsConformal: {
            mips_derivatives(J, E, gE, hE, want_hessian);
            const double ex = std::exp(E);
            r.value = ex;
            r.grad = ex * gE;
            if (want_hessian) r.hess = ex * (gE * gE.transpose() + hE);
            if (!std::isfinite(r.value)) r.finite = false;
            break;
        }
        case EnergyKind::IsoExpArea: {
            iso_derivatives(J, E, gE, hE, want_hessian);
            const double ex = std::exp(E);
            r.value = ex;
            r.grad = ex * gE;
            if (want_hessian) r.hess = ex * (gE * gE.transpose() + hE);
            if (!std::isfinite(r.value)) r.finite = false;
            break;
        }
        case EnergyKind::IsoSumArea: {
            iso_derivatives(J, E, gE, hE, want_hessian);
            r.value = E;
            r.grad = gE;
            if (want_hessian) r.hess = hE;
            break;
        }
    }
    return r;
}

// vec(J) = K x with x = (u0, u1, u2) stacked; J = [u1-u0 | u2-u0] * shape_inv
Mat46 jacobian_chain(const LocalFrame& frame) {
    const Eigen::Matrix2d& S = frame.shape_inv;
    // vec(U) = B x with U = [u1-u0 | u2-u0]
    Eigen::Matrix<double, 4, 6> B = Eigen::Matrix<double, 4, 6>::Zero();
    B(0, 2) = 1.0; B(0, 0) = -1.0;
    B(1, 3) = 1.0; B(1, 1) = -1.0;
    B(2, 4) = 1.0; B(2, 0) = -1.0;
    B(3, 5) = 1.0; B(3, 1) = -1.0;
    // vec(J) = (S^T kron I2) vec(U)
    Mat4 K = Mat4::Zero();
    K(0, 0) = K(1, 1) = S(0, 0);
    K(0, 2) = K(1, 3) = S(1, 0);
    K(2, 0) = K(3, 1) = S(0, 1);
    K(2, 2) = K(3, 3) = S(1, 1);
    return K * B;
}

double weight_of(const LocalFrame& frame, EnergyKind kind) {
    return (kind == EnergyKind::IsoExpArea || kind == EnergyKind::IsoSumArea) ? frame.area
                                                                              : 1.0;
}

}  // namespace

TriDerivatives tri_energy_derivatives(const LocalFrame& frame, const Vec2& u0,
                                      const Vec2& u1, const Vec2& u2, EnergyKind kind,
                                      bool want_hessian) {
    Eigen::Matrix2d U;
    U.col(0) = u1 - u0;
    U.col(1) = u2 - u0;
    const Eigen::Matrix2d J = U * frame.shape_inv;
    const JEval g = eval_g(J, kind, want_hessian);
    TriDerivatives out;
    const double w = weight_of(frame, kind);
    if (!g.finite) {
        out.value = kInf;
        return out;
    }
    const Mat46 K = jacobian_chain(frame);
    out.value = w * g.value;
    out.grad = w * (K.transpose() * g.grad);
    if (want_hessian) {
        Mat6 H = w * (K.transpose() * g.hess * K);
        // convexify: clamp negative eigenvalues
        Eigen::SelfAdjointEigenSolver<Mat6> es(H);
        Vec6 ev = es.eigenvalues();
        bool indefinite = false;
        for (int i = 0; i < 6; ++i)
            if (ev[i] < 0.0) {
                ev[i] = 0.0;
                indefinite = true;
            }
        out.hess = indefinite
                       ? Mat6(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose())
                       : H;
    }
    return out;
}

namespace {

template <bool Parallel>
double total_energy_impl(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                         const PlanarParam& uv, EnergyKind kind) {
    const int nt = disk.num_triangles();
    std::vector<double> per_tri(nt);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel && nt > 512)
#endif
    for (int t = 0; t < nt; ++t) {
        const auto& tri = disk.triangles[t];
        Eigen::Matrix2d U;
        U.col(0) = uv[tri[1]] - uv[tri[0]];
        U.col(1) = uv[tri[2]] - uv[tri[0]];
        const Eigen::Matrix2d J = U * frames[t].shape_inv;
        const double d = J.determinant();
        double value;
        if (!(d > 0.0)) {
            value = kInf;
        } else {
            const double mips = 0.5 * J.squaredNorm() / d;
            switch (kind) {
                case EnergyKind::MipsSum: value = mips; break;
                case EnergyKind::AmipsConformal: value = std::exp(mips); break;
                case EnergyKind::IsoExpArea:
                    value = frames[t].area *
                            std::exp(0.5 * (0.5 * (d + 1.0 / d) + mips));
                    break;
                case EnergyKind::IsoSumArea:
                    value = frames[t].area * 0.5 * (0.5 * (d + 1.0 / d) + mips);
                    break;
                default: value = kInf;
            }
        }
        per_tri[t] = value;
    }
    double sum = 0.0;  // serial reduction keeps the result thread-count independent
    for (double v : per_tri) {
        if (!std::isfinite(v)) return kInf;
        sum += v;
    }
    return sum;
}

template <bool Parallel>
double energy_gradient_impl(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                            const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad,
                            std::vector<Eigen::Triplet<double>>* triplets) {
    const int nt = disk.num_triangles();
    const int nv = disk.num_vertices();
    const bool want_hessian = triplets != nullptr;
    std::vector<TriDerivatives> per_tri(nt);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel && nt > 256)
#endif
    for (int t = 0; t < nt; ++t) {
        const auto& tri = disk.triangles[t];
        per_tri[t] = tri_energy_derivatives(frames[t], uv[tri[0]], uv[tri[1]], uv[tri[2]],
                                            kind, want_hessian);
    }
    grad.setZero(2 * nv);
    if (triplets) {
        triplets->clear();
        triplets->reserve(static_cast<std::size_t>(nt) * 36);
    }
    double sum = 0.0;
    for (int t = 0; t < nt; ++t) {
        const TriDerivatives& d = per_tri[t];
        if (!std::isfinite(d.value)) return kInf;
        sum += d.value;
        const auto& tri = disk.triangles[t];
        for (int a = 0; a < 3; ++a) {
            grad[2 * tri[a]] += d.grad[2 * a];
            grad[2 * tri[a] + 1] += d.grad[2 * a + 1];
        }
        if (triplets) {
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b)
                    triplets->emplace_back(2 * tri[a / 2] + a % 2, 2 * tri[b / 2] + b % 2,
                                           d.hess(a, b));
        }
    }
    return sum;
}

}  // namespace

double total_energy(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                    const PlanarParam& uv, EnergyKind kind) {
    return total_energy_impl<true>(disk, frames, uv, kind);
}

double total_energy_serial(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                           const PlanarParam& uv, EnergyKind kind) {
    return total_energy_impl<false>(disk, frames, uv, kind);
}

double energy_gradient(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                       const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad) {
    return energy_gradient_impl<true>(disk, frames, uv, kind, grad, nullptr);
}

double energy_gradient_serial(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                              const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad) {
    return energy_gradient_impl<false>(disk, frames, uv, kind, grad, nullptr);
}

double energy_gradient_hessian(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                               const PlanarParam& uv, EnergyKind kind, Eigen::VectorXd& grad,
                               std::vector<Eigen::Triplet<double>>& triplets) {
    return energy_gradient_impl<true>(disk, frames, uv, kind, grad, &triplets);
}

}  // namespace dpoint
