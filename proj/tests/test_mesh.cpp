#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "dpoint/cut.hpp"
#include "dpoint/obj_io.hpp"
#include "dpoint/trimesh.hpp"
#include "support/meshgen.hpp"

using namespace dpoint;
namespace ts = dpoint::testsupport;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("dpoint_mesh_" + name);
}

/// order-independent connectivity fingerprint on origin indices
std::multiset<std::array<int, 3>> connectivity_on_origins(const TriMesh& m) {
    std::multiset<std::array<int, 3>> out;
    for (const auto& t : m.triangles) {
        std::array<int, 3> o = {m.origin_of(t[0]), m.origin_of(t[1]), m.origin_of(t[2])};
        // rotate smallest first, orientation preserved
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (o[i] < o[k]) k = i;
        out.insert({o[k], o[(k + 1) % 3], o[(k + 2) % 3]});
    }
    return out;
}

}  // namespace

TEST_CASE("cube obj loads with expected counts") {
    const auto path = temp_file("cube.obj");
    save_obj(ts::make_cube_coarse(), std::nullopt, path.string());
    const TriMesh m = load_obj(path.string());
    CHECK(m.num_vertices() == 8);
    CHECK(m.num_triangles() == 12);
}

TEST_CASE("zero face index is a parse error") {
    const auto path = temp_file("bad.obj");
    std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
    CHECK_THROWS(load_obj(path.string()));
}

TEST_CASE("tetrahedron is a closed manifold") {
    const TriMesh m = ts::make_tetrahedron();
    const MeshTopology topo(m);
    CHECK(topo.is_closed());
    for (const MeshEdge& e : topo.edges()) CHECK_FALSE(e.boundary());
    CHECK(topo.num_edges() == 6);
}

TEST_CASE("save/load round trip is connectivity-identical and position-stable") {
    const TriMesh cube = ts::make_cube_grid(3);
    const auto path = temp_file("roundtrip.obj");
    save_obj(cube, std::nullopt, path.string());
    const TriMesh back = load_obj(path.string());
    REQUIRE(back.num_vertices() == cube.num_vertices());
    REQUIRE(back.triangles == cube.triangles);
    double max_err = 0.0;
    for (int v = 0; v < cube.num_vertices(); ++v)
        max_err = std::max(max_err, (cube.vertices[v] - back.vertices[v]).lpNorm<Eigen::Infinity>());
    CHECK(max_err < 1e-6);
}

TEST_CASE("uv obj has one vt per vertex") {
    TriMesh tet = ts::make_tetrahedron();
    EdgePath path{{0, 1}, false};
    TriMesh disk = cut_along(tet, path);
    PlanarParam uv(disk.num_vertices(), Vec2(0.25, 0.25));
    const auto out = temp_file("uv.obj");
    save_obj(disk, uv, out.string());
    std::ifstream in(out);
    std::string line;
    int vt = 0, v = 0;
    while (std::getline(in, line)) {
        if (line.rfind("vt ", 0) == 0) ++vt;
        else if (line.rfind("v ", 0) == 0) ++v;
    }
    CHECK(vt == disk.num_vertices());
    CHECK(v == disk.num_vertices());
}

TEST_CASE("non-manifold input is rejected") {
    TriMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    // three triangles share edge (0,1)
    m.triangles = {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
    CHECK_THROWS(MeshTopology(m));
}

TEST_CASE("genus from Euler characteristic") {
    CHECK(MeshTopology(ts::make_cube_coarse()).genus() == 0);
    CHECK(MeshTopology(ts::make_icosphere(2)).genus() == 0);
    CHECK(MeshTopology(ts::make_torus(24, 12)).genus() == 1);
    // genus query on a mesh with boundary is rejected
    TriMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.triangles = {{0, 1, 2}};
    CHECK_THROWS(MeshTopology(tri).genus());
}

TEST_CASE("open path cut duplicates interior vertices only") {
    const TriMesh sphere = ts::make_icosphere(2);
    // find a 5-vertex path along edges
    MeshTopology topo(sphere);
    std::vector<int> verts{0};
    while (verts.size() < 5) {
        for (int w : topo.vertex_neighbors(verts.back())) {
            if (std::find(verts.begin(), verts.end(), w) == verts.end()) {
                verts.push_back(w);
                break;
            }
        }
    }
    EdgePath path{verts, false};
    const TriMesh disk = cut_along(sphere, path);
    CHECK(disk.num_vertices() == sphere.num_vertices() + 3);
    CHECK(disk.num_triangles() == sphere.num_triangles());
    const MeshTopology dtopo(disk);
    CHECK(dtopo.boundary_loops().size() == 1);
    CHECK(dtopo.euler_characteristic() == 1);
    CHECK(disk.total_area() == doctest::Approx(sphere.total_area()).epsilon(1e-12));
}

TEST_CASE("cut then zip by origin reproduces connectivity") {
    const TriMesh sphere = ts::make_icosphere(1);
    const auto before = connectivity_on_origins(sphere);
    EdgePath path{{0, MeshTopology(sphere).vertex_neighbors(0)[0]}, false};
    const TriMesh disk = cut_along(sphere, path);
    CHECK(connectivity_on_origins(disk) == before);
}

TEST_CASE("torus loop cut gives two boundary loops, filling drops genus") {
    const TriMesh torus = ts::make_torus(16, 8);
    // a minor (tube) loop: vertices of one major ring
    EdgePath loop;
    loop.closed = true;
    for (int j = 0; j < 8; ++j) loop.vertices.push_back(j);
    const TriMesh open = cut_along(torus, loop);
    const MeshTopology otopo(open);
    CHECK(otopo.boundary_loops().size() == 2);
    const FillResult filled = fill_holes(open);
    const MeshTopology ftopo(filled.mesh);
    CHECK(ftopo.is_closed());
    CHECK(ftopo.genus() == 0);
    CHECK(filled.filled_triangles.size() == 16);
}

TEST_CASE("fill_holes on a disk fan") {
    // hexagonal disk: center + 6 ring vertices
    TriMesh disk;
    disk.vertices.push_back(Vec3(0, 0, 0));
    for (int i = 0; i < 6; ++i) {
        const double a = std::numbers::pi / 3.0 * i;
        disk.vertices.push_back(Vec3(std::cos(a), std::sin(a), 0));
    }
    for (int i = 0; i < 6; ++i) disk.triangles.push_back({0, 1 + i, 1 + (i + 1) % 6});
    const FillResult r = fill_holes(disk);
    CHECK(r.mesh.num_vertices() == 8);
    CHECK(r.mesh.num_triangles() == 12);
    CHECK(MeshTopology(r.mesh).is_closed());
    CHECK_THROWS(fill_holes(r.mesh));  // already closed
}

TEST_CASE("self-intersecting path is rejected") {
    const TriMesh sphere = ts::make_icosphere(1);
    MeshTopology topo(sphere);
    const int n0 = topo.vertex_neighbors(0)[0];
    EdgePath bad{{0, n0, 0}, false};
    CHECK_THROWS(cut_along(sphere, bad));
}

TEST_CASE("n_ring") {
    const TriMesh cube = ts::make_cube_coarse();
    const MeshTopology topo(cube);
    CHECK(n_ring(topo, 0, 0).empty());
    const auto ring1 = n_ring(topo, 0, 1);
    CHECK(ring1.size() == topo.vertex_neighbors(0).size());

    // icosahedron: 2-ring reaches everything except the antipode
    const TriMesh ico = ts::make_icosphere(0);
    const MeshTopology itopo(ico);
    // brute-force BFS oracle
    for (int v = 0; v < 12; ++v) {
        std::set<int> expect;
        for (int u : itopo.vertex_neighbors(v)) {
            expect.insert(u);
            for (int w : itopo.vertex_neighbors(u))
                if (w != v) expect.insert(w);
        }
        const auto got = n_ring(itopo, v, 2);
        CHECK(std::set<int>(got.begin(), got.end()) == expect);
        CHECK(got.size() == 10);
        CHECK(n_ring(itopo, v, 3).size() == 11);
    }
    CHECK_THROWS(n_ring(topo, -1, 1));
}
