#include "dpoint/param.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Sparse>

namespace dpoint {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<LocalFrame> local_frames(const TriMesh& mesh) {
    const int nt = mesh.num_triangles();
    std::vector<LocalFrame> frames(nt);
    double mean_area = mesh.total_area() / std::max(nt, 1);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec3 e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
        const Vec3 e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
        const double area = 0.5 * e1.cross(e2).norm();
        if (!(area > 1e-12 * mean_area))
            throw std::runtime_error("local_frames: degenerate triangle " + std::to_string(t));
        const double l1 = e1.norm();
        const double x2 = e1.dot(e2) / l1;
        const double y2 = 2.0 * area / l1;  // positive: corner 2 above the x axis
        LocalFrame& f = frames[t];
        f.p[0] = Vec2(0.0, 0.0);
        f.p[1] = Vec2(l1, 0.0);
        f.p[2] = Vec2(x2, y2);
        Eigen::Matrix2d shape;
        shape.col(0) = f.p[1] - f.p[0];
        shape.col(1) = f.p[2] - f.p[0];
        f.shape_inv = shape.inverse();
        f.area = area;
    }
    return frames;
}

std::array<double, 2> singular_values_2x2(const Eigen::Matrix2d& J) {
    const double e = 0.5 * (J(0, 0) + J(1, 1));
    const double f = 0.5 * (J(0, 0) - J(1, 1));
    const double g = 0.5 * (J(1, 0) + J(0, 1));
    const double h = 0.5 * (J(1, 0) - J(0, 1));
    const double q = std::hypot(e, h);
    const double r = std::hypot(f, g);
    return {q + r, std::abs(q - r)};
}

double JacobianField::min_det() const {
    double m = kInf;
    for (double d : det) m = std::min(m, d);
    return m;
}

JacobianField jacobians(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                        const PlanarParam& uv) {
    if (static_cast<int>(uv.size()) != disk.num_vertices())
        throw std::runtime_error("jacobians: uv size mismatch");
    const int nt = disk.num_triangles();
    JacobianField field;
    field.J.resize(nt);
    field.det.resize(nt);
    field.sigma.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = disk.triangles[t];
        Eigen::Matrix2d U;
        U.col(0) = uv[tri[1]] - uv[tri[0]];
        U.col(1) = uv[tri[2]] - uv[tri[0]];
        const Eigen::Matrix2d J = U * frames[t].shape_inv;
        field.J[t] = J;
        field.det[t] = J.determinant();
        field.sigma[t] = singular_values_2x2(J);
    }
    return field;
}

double mips_energy(const Eigen::Matrix2d& J) {
    const double d = J.determinant();
    if (!(d > 0.0)) return kInf;
    return 0.5 * J.squaredNorm() / d;
}

double amips_energy(const JacobianField& field) {
    double sum = 0.0;
    for (int t = 0; t < field.size(); ++t) {
        const double e = mips_energy(field.J[t]);
        if (!std::isfinite(e)) return kInf;
        sum += std::exp(e);
    }
    return sum;
}

double iso_distortion(const Eigen::Matrix2d& J) {
    const double d = J.determinant();
    if (!(d > 0.0)) return kInf;
    const double area = 0.5 * (d + 1.0 / d);
    return 0.5 * (area + mips_energy(J));
}

PlanarParam tutte_embed(const TriMesh& disk) {
    const MeshTopology topo(disk);
    const auto loops = topo.boundary_loops();
    if (loops.size() != 1)
        throw std::runtime_error("tutte_embed: mesh must have exactly one boundary loop");
    const auto& loop = loops[0];
    const int nv = disk.num_vertices();

    PlanarParam uv(nv, Vec2::Zero());
    std::vector<char> on_boundary(nv, 0);

    // boundary on the unit circle, spacing proportional to 3D edge lengths
    double total = 0.0;
    std::vector<double> arc(loop.size(), 0.0);
    for (std::size_t i = 0; i < loop.size(); ++i) {
        arc[i] = total;
        const Vec3& a = disk.vertices[loop[i]];
        const Vec3& b = disk.vertices[loop[(i + 1) % loop.size()]];
        total += (a - b).norm();
    }
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const double angle = 2.0 * std::numbers::pi * arc[i] / total;
        uv[loop[i]] = Vec2(std::cos(angle), std::sin(angle));
        on_boundary[loop[i]] = 1;
    }

    // mean-value weights: positive (so the convex-combination embedding is
    // still flip-free) but geometry-aware. Uniform weights shrink the
    // interior of large disks below double precision when triangle sizes are
    // very non-uniform; mean-value weights keep the area distribution tame.
    std::vector<std::vector<std::pair<int, double>>> weights(nv);
    for (int v = 0; v < nv; ++v) {
        if (on_boundary[v]) continue;
        for (int t : topo.vertex_triangles(v)) {
            const auto& tri = disk.triangles[t];
            int k = 0;
            while (tri[k] != v) ++k;
            const int a = tri[(k + 1) % 3];
            const int b = tri[(k + 2) % 3];
            const Vec3 ea = disk.vertices[a] - disk.vertices[v];
            const Vec3 eb = disk.vertices[b] - disk.vertices[v];
            const double angle = std::atan2(ea.cross(eb).norm(), ea.dot(eb));
            const double half_tan = std::tan(0.5 * angle);
            weights[v].push_back({a, half_tan / ea.norm()});
            weights[v].push_back({b, half_tan / eb.norm()});
        }
    }

    std::vector<int> interior_id(nv, -1);
    std::vector<int> interior;
    for (int v = 0; v < nv; ++v) {
        if (!on_boundary[v]) {
            interior_id[v] = static_cast<int>(interior.size());
            interior.push_back(v);
        }
    }
    const int n = static_cast<int>(interior.size());
    if (n > 0) {
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n, 2);
        for (int i = 0; i < n; ++i) {
            const int v = interior[i];
            double sum = 0.0;
            for (const auto& [w, wt] : weights[v]) sum += wt;
            trip.emplace_back(i, i, 1.0);
            for (const auto& [w, wt] : weights[v]) {
                if (on_boundary[w]) {
                    rhs.row(i) += (wt / sum) * uv[w].transpose();
                } else {
                    trip.emplace_back(i, interior_id[w], -wt / sum);
                }
            }
        }
        Eigen::SparseMatrix<double> L(n, n);
        L.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver(L);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("tutte_embed: factorization failed (disconnected interior?)");
        const Eigen::MatrixX2d x = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("tutte_embed: solve failed");
        const double residual = (L * x - rhs).norm() / std::max(rhs.norm(), 1e-30);
        if (residual > 1e-8)
            throw std::runtime_error("tutte_embed: solver did not converge");
        for (int i = 0; i < n; ++i) uv[interior[i]] = x.row(i).transpose();
    }
    return uv;
}

}  // namespace dpoint
