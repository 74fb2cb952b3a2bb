#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpoint/vote.hpp"
#include "support/meshgen.hpp"

using namespace dpoint;
namespace ts = dpoint::testsupport;

namespace {

CandidateSet cands(std::initializer_list<int> verts) {
    CandidateSet c;
    for (int v : verts) c.push_back({v, 3.0});
    return c;
}

}  // namespace

TEST_CASE("tally counts run membership") {
    std::vector<CandidateSet> runs{cands({1, 2}), cands({2, 3}), cands({2})};
    const VoteTally t = tally(runs);
    CHECK(t.runs == 3);
    CHECK(t.counts.at(1) == 1);
    CHECK(t.counts.at(2) == 3);
    CHECK(t.counts.at(3) == 1);
    CHECK(t.counts.size() == 3);
}

TEST_CASE("select applies the vote threshold") {
    std::vector<CandidateSet> runs{cands({1, 2}), cands({2, 3}), cands({2, 3})};
    const VoteTally t = tally(runs);
    const DistortionPointSet p = select(t, 2);
    CHECK(p.points.size() == 2);
    CHECK(p.contains(2));
    CHECK(p.contains(3));
    CHECK_FALSE(p.contains(1));
    CHECK(select(t, 4).points.empty());

    // raising min_votes is monotone
    std::size_t prev = select(t, 1).points.size();
    for (int m = 2; m <= 4; ++m) {
        const std::size_t cur = select(t, m).points.size();
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("post_filter keeps the strongest of near-duplicates") {
    const TriMesh sphere = ts::make_icosphere(2);
    const MeshTopology topo(sphere);

    // two points adjacent to each other plus one far away
    const int a = 0;
    const int b = topo.vertex_neighbors(0)[0];
    int far = 0;
    {
        double best = -1.0;
        for (int v = 0; v < sphere.num_vertices(); ++v) {
            const double d = (sphere.vertices[v] - sphere.vertices[a]).norm();
            if (d > best) {
                best = d;
                far = v;
            }
        }
    }
    DistortionPointSet in;
    in.points = {{a, 5}, {b, 7}, {far, 4}};
    const DistortionPointSet out = post_filter(in, topo, 2);
    CHECK(out.points.size() == 2);
    CHECK(out.contains(b));   // higher votes wins the pair
    CHECK(out.contains(far));
    CHECK_FALSE(out.contains(a));
}

TEST_CASE("post_filter tie goes to the smaller index") {
    const TriMesh sphere = ts::make_icosphere(1);
    const MeshTopology topo(sphere);
    const int a = 0;
    const int b = topo.vertex_neighbors(0)[0];
    DistortionPointSet in;
    in.points = {{std::max(a, b), 5}, {std::min(a, b), 5}};
    const DistortionPointSet out = post_filter(in, topo, 1);
    REQUIRE(out.points.size() == 1);
    CHECK(out.points[0].vertex == std::min(a, b));
}

TEST_CASE("post_filter is idempotent and separates survivors") {
    const TriMesh sphere = ts::make_icosphere(2);
    const MeshTopology topo(sphere);
    DistortionPointSet in;
    for (int v = 0; v < sphere.num_vertices(); v += 9) in.points.push_back({v, 1 + v % 5});
    const int n = 3;
    const DistortionPointSet once = post_filter(in, topo, n);
    const DistortionPointSet twice = post_filter(once, topo, n);
    REQUIRE(once.points.size() == twice.points.size());
    for (std::size_t i = 0; i < once.points.size(); ++i) {
        CHECK(once.points[i].vertex == twice.points[i].vertex);
        CHECK(once.points[i].votes == twice.points[i].votes);
    }
    // pairwise separation: no survivor in another survivor's n-ring
    for (const auto& p : once.points) {
        const auto ring = n_ring(topo, p.vertex, n);
        for (const auto& q : once.points) {
            if (q.vertex == p.vertex) continue;
            CHECK(std::find(ring.begin(), ring.end(), q.vertex) == ring.end());
        }
    }
}

TEST_CASE("post_filter with n=0 keeps everything") {
    const TriMesh sphere = ts::make_icosphere(1);
    const MeshTopology topo(sphere);
    DistortionPointSet in;
    in.points = {{0, 1}, {1, 2}, {2, 3}};
    CHECK(post_filter(in, topo, 0).points.size() == 3);
}
