#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dpoint/simplify.hpp"
#include "dpoint/trimesh.hpp"
#include "support/meshgen.hpp"

using namespace dpoint;
namespace ts = dpoint::testsupport;

TEST_CASE("icosphere simplifies to the target and stays a closed genus-0 manifold") {
    const TriMesh sphere = ts::make_icosphere(3);  // 642 vertices
    const SimplifyResult r = qem_simplify(sphere, 300);
    CHECK(r.reached_target);
    CHECK(r.mesh.num_vertices() == 300);
    const MeshTopology topo(r.mesh);
    CHECK(topo.is_closed());
    CHECK(topo.genus() == 0);
    // vertices stay near the unit sphere (quadric placement on a smooth shape)
    for (const auto& p : r.mesh.vertices) CHECK(p.norm() == doctest::Approx(1.0).epsilon(0.1));
    // surface area is roughly preserved
    CHECK(r.mesh.total_area() == doctest::Approx(sphere.total_area()).epsilon(0.1));
}

TEST_CASE("simplification preserves genus on a torus") {
    const TriMesh torus = ts::make_torus(32, 16);  // 512 vertices
    const SimplifyResult r = qem_simplify(torus, 200);
    CHECK(r.reached_target);
    const MeshTopology topo(r.mesh);
    CHECK(topo.is_closed());
    CHECK(topo.genus() == 1);
}

TEST_CASE("already-small meshes pass through unchanged") {
    const TriMesh sphere = ts::make_icosphere(1);  // 42 vertices
    const SimplifyResult r = qem_simplify(sphere, 100);
    CHECK(r.mesh.num_vertices() == 42);
    CHECK(r.mesh.triangles == sphere.triangles);
}

TEST_CASE("target below 4 is rejected") {
    CHECK_THROWS(qem_simplify(ts::make_icosphere(1), 3));
}

TEST_CASE("open meshes are rejected") {
    CHECK_THROWS(qem_simplify(ts::make_strip(6), 4));
}

TEST_CASE("nearest_vertex matches brute force") {
    const TriMesh mesh = ts::make_icosphere(2);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 200; ++i) {
        const Vec3 q(u(rng), u(rng), u(rng));
        const int got = nearest_vertex(mesh, q);
        int expect = 0;
        for (int v = 1; v < mesh.num_vertices(); ++v) {
            const double dv = (mesh.vertices[v] - q).squaredNorm();
            const double de = (mesh.vertices[expect] - q).squaredNorm();
            if (dv < de) expect = v;
        }
        CHECK((mesh.vertices[got] - q).squaredNorm() ==
              doctest::Approx((mesh.vertices[expect] - q).squaredNorm()));
    }
    // exact hits resolve to the vertex itself
    for (int v = 0; v < mesh.num_vertices(); v += 17)
        CHECK(nearest_vertex(mesh, mesh.vertices[v]) == v);
}

TEST_CASE("map_back on an identical mesh is the identity") {
    const TriMesh mesh = ts::make_icosphere(2);
    DistortionPointSet in;
    in.points = {{3, 5}, {100, 4}, {7, 9}};
    const DistortionPointSet out = map_back(in, mesh, mesh);
    REQUIRE(out.points.size() == 3);
    for (const auto& p : in.points) {
        bool found = false;
        for (const auto& q : out.points)
            if (q.vertex == p.vertex && q.votes == p.votes) found = true;
        CHECK(found);
    }
}

TEST_CASE("map_back merges collisions keeping the larger vote count") {
    // original: a single far-apart pair; simplified: two nearby probes that
    // both resolve to original vertex 0
    TriMesh original;
    original.vertices = {{0, 0, 0}, {10, 0, 0}};
    TriMesh probes;
    probes.vertices = {{0.1, 0, 0}, {-0.1, 0, 0}};
    DistortionPointSet in;
    in.points = {{0, 4}, {1, 7}};
    const DistortionPointSet out = map_back(in, probes, original);
    REQUIRE(out.points.size() == 1);
    CHECK(out.points[0].vertex == 0);
    CHECK(out.points[0].votes == 7);
}

TEST_CASE("detection-scale simplification keeps point locations meaningful") {
    // simplify, then map a known simplified vertex back: the recovered
    // original vertex must be close to it
    const TriMesh sphere = ts::make_icosphere(3);
    const SimplifyResult r = qem_simplify(sphere, 150);
    REQUIRE(r.reached_target);
    DistortionPointSet in;
    in.points = {{0, 5}, {75, 4}};
    const DistortionPointSet out = map_back(in, r.mesh, sphere);
    REQUIRE(out.points.size() == 2);
    const double tol = 2.0 * sphere.mean_edge_length() + 0.2;  // coarse mesh slack
    for (const auto& p : in.points) {
        double best = 1e9;
        for (const auto& q : out.points)
            best = std::min(best,
                            (sphere.vertices[q.vertex] - r.mesh.vertices[p.vertex]).norm());
        CHECK(best < tol);
    }
}
