#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

#include "dpoint/cut.hpp"
#include "dpoint/param.hpp"
#include "dpoint/trimesh.hpp"
#include "support/meshgen.hpp"

using namespace dpoint;
namespace ts = dpoint::testsupport;

namespace {

Eigen::Matrix2d rot(double deg) {
    const double a = deg * std::numbers::pi / 180.0;
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

/// uv = A * frame-coordinates + b, giving per-triangle Jacobian exactly A.
PlanarParam affine_param(const TriMesh& disk, const std::vector<LocalFrame>& frames,
                         const Eigen::Matrix2d& A) {
    // only valid per-triangle; used on single-triangle meshes
    PlanarParam uv(disk.num_vertices());
    const auto& t = disk.triangles[0];
    for (int k = 0; k < 3; ++k) uv[t[k]] = A * frames[0].p[k];
    return uv;
}

TriMesh one_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    TriMesh m;
    m.vertices = {a, b, c};
    m.triangles = {{0, 1, 2}};
    return m;
}

}  // namespace

TEST_CASE("local frames are isometric") {
    const TriMesh mesh = ts::make_icosphere(1);
    const auto frames = local_frames(mesh);
    REQUIRE(frames.size() == static_cast<std::size_t>(mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const LocalFrame& f = frames[t];
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                const double d3 = (mesh.vertices[tri[i]] - mesh.vertices[tri[j]]).norm();
                CHECK((f.p[i] - f.p[j]).norm() == doctest::Approx(d3).epsilon(1e-12));
            }
        CHECK(f.p[0].norm() == 0.0);
        CHECK(f.p[1].y() == 0.0);
        CHECK(f.p[2].y() > 0.0);
        const double area2 =
            0.5 * ((f.p[1] - f.p[0]).x() * (f.p[2] - f.p[0]).y() -
                   (f.p[1] - f.p[0]).y() * (f.p[2] - f.p[0]).x());
        CHECK(f.area == doctest::Approx(area2).epsilon(1e-12));
    }
}

TEST_CASE("degenerate triangles are rejected") {
    TriMesh m = one_triangle({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
    CHECK_THROWS(local_frames(m));
}

TEST_CASE("singular values match Eigen's SVD") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        Eigen::Matrix2d J;
        J << u(rng), u(rng), u(rng), u(rng);
        const auto s = singular_values_2x2(J);
        const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
        CHECK(s[0] == doctest::Approx(svd.singularValues()[0]).epsilon(1e-10));
        CHECK(s[1] == doctest::Approx(svd.singularValues()[1]).epsilon(1e-10));
        CHECK(s[0] >= s[1]);
    }
}

TEST_CASE("energy values on known Jacobians") {
    Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    CHECK(mips_energy(I) == doctest::Approx(1.0));
    CHECK(iso_distortion(I) == doctest::Approx(1.0));

    Eigen::Matrix2d D = Eigen::Vector2d(2.0, 1.0).asDiagonal();
    // sigma 2,1: mips = 0.5*(2 + 1/2) = 1.25
    CHECK(mips_energy(D) == doctest::Approx(1.25));
    // E_area = 0.5*(2 + 1/2) = 1.25, E_iso = 0.5*(1.25 + 1.25) = 1.25
    CHECK(iso_distortion(D) == doctest::Approx(1.25));

    Eigen::Matrix2d S = 2.0 * rot(37.0);  // similarity: conformal but not isometric
    CHECK(mips_energy(S) == doctest::Approx(1.0));
    // det = 4: E_area = 0.5*(4 + 1/4) = 2.125, E_iso = 0.5*(2.125 + 1) = 1.5625
    CHECK(iso_distortion(S) == doctest::Approx(1.5625));

    // MIPS is scale invariant, iso distortion is not
    Eigen::Matrix2d D3 = 3.0 * D;
    CHECK(mips_energy(D3) == doctest::Approx(mips_energy(D)));
    CHECK(iso_distortion(D3) > iso_distortion(D));

    // flipped and degenerate maps hit the barrier
    Eigen::Matrix2d F = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    CHECK(std::isinf(mips_energy(F)));
    CHECK(std::isinf(iso_distortion(F)));
    CHECK(std::isinf(iso_distortion(Eigen::Matrix2d::Zero())));
}

TEST_CASE("jacobians recover the exact affine map") {
    const TriMesh tri = one_triangle({0, 0, 0}, {2, 0, 0}, {0.3, 1.7, 0});
    const auto frames = local_frames(tri);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        Eigen::Matrix2d A;
        A << u(rng), u(rng), u(rng), u(rng);
        const PlanarParam uv = affine_param(tri, frames, A);
        const JacobianField jac = jacobians(tri, frames, uv);
        CHECK((jac.J[0] - A).norm() < 1e-12 * std::max(1.0, A.norm()));
        CHECK(jac.det[0] == doctest::Approx(A.determinant()).epsilon(1e-10));
    }
}

TEST_CASE("amips is the sum of exp(mips)") {
    const TriMesh tet = ts::make_tetrahedron();
    const TriMesh disk = cut_along(tet, EdgePath{{0, 1, 2}, false});
    const auto frames = local_frames(disk);
    const PlanarParam uv = tutte_embed(disk);
    const JacobianField jac = jacobians(disk, frames, uv);
    double expect = 0.0;
    for (const auto& J : jac.J) expect += std::exp(mips_energy(J));
    CHECK(amips_energy(jac) == doctest::Approx(expect).epsilon(1e-12));
}

namespace {

/// mean-value weight of directed edge v->w, summed over incident triangles
double mean_value_weight(const TriMesh& m, const MeshTopology& topo, int v, int w) {
    double weight = 0.0;
    for (int t : topo.vertex_triangles(v)) {
        const auto& tri = m.triangles[t];
        if (tri[0] != w && tri[1] != w && tri[2] != w) continue;
        int k = 0;
        while (tri[k] != v) ++k;
        const Vec3 ea = m.vertices[tri[(k + 1) % 3]] - m.vertices[v];
        const Vec3 eb = m.vertices[tri[(k + 2) % 3]] - m.vertices[v];
        const double angle = std::atan2(ea.cross(eb).norm(), ea.dot(eb));
        weight += std::tan(0.5 * angle) / (m.vertices[w] - m.vertices[v]).norm();
    }
    return weight;
}

}  // namespace

TEST_CASE("tutte embedding: boundary circle, interior balance, no flips") {
    const TriMesh sphere = ts::make_icosphere(2);
    const TriMesh disk = [&] {
        MeshTopology topo(sphere);
        std::vector<int> verts{0};
        for (int i = 0; i < 4; ++i) {
            for (int w : topo.vertex_neighbors(verts.back()))
                if (std::find(verts.begin(), verts.end(), w) == verts.end()) {
                    verts.push_back(w);
                    break;
                }
        }
        return cut_along(sphere, EdgePath{verts, false});
    }();
    const PlanarParam uv = tutte_embed(disk);
    const MeshTopology topo(disk);

    std::vector<char> on_boundary(disk.num_vertices(), 0);
    for (const auto& loop : topo.boundary_loops())
        for (int v : loop) on_boundary[v] = 1;
    for (int v = 0; v < disk.num_vertices(); ++v) {
        if (on_boundary[v]) {
            CHECK(uv[v].norm() == doctest::Approx(1.0).epsilon(1e-9));
        } else {
            // each interior vertex is the mean-value weighted average of its
            // neighbors (in particular, a strict convex combination)
            Vec2 mean = Vec2::Zero();
            double sum = 0.0;
            for (int w : topo.vertex_neighbors(v)) {
                const double wt = mean_value_weight(disk, topo, v, w);
                CHECK(wt > 0.0);
                mean += wt * uv[w];
                sum += wt;
            }
            CHECK((uv[v] - mean / sum).norm() < 1e-8);
        }
    }
    const JacobianField jac = jacobians(disk, local_frames(disk), uv);
    CHECK(jac.min_det() > 0.0);
}

TEST_CASE("tutte on a hexagon fan puts the center at the centroid") {
    TriMesh fan;
    fan.vertices.push_back(Vec3(0, 0, 0));
    for (int i = 0; i < 6; ++i) {
        const double a = std::numbers::pi / 3.0 * i;
        fan.vertices.push_back(Vec3(std::cos(a), std::sin(a), 0));
    }
    for (int i = 0; i < 6; ++i) fan.triangles.push_back({0, 1 + i, 1 + (i + 1) % 6});
    const PlanarParam uv = tutte_embed(fan);
    // regular boundary spacing -> ring centroid is the origin
    CHECK(uv[0].norm() < 1e-9);
    for (int i = 1; i <= 6; ++i) CHECK(uv[i].norm() == doctest::Approx(1.0).epsilon(1e-9));
}
