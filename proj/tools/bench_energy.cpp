// Benchmark: serial vs OpenMP energy/gradient assembly on a cut icosphere.
// Usage: bench_energy [subdivisions=5] [repeats=20]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <vector>

#include "dpoint/cutgen.hpp"
#include "dpoint/energy_kernels.hpp"
#include "dpoint/param.hpp"
#include "dpoint/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace dpoint;
using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int repeats) {
    const auto start = Clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count() / repeats;
}

TriMesh make_icosphere(int subdiv) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (auto& p : m.vertices) p.normalize();
    for (int s = 0; s < subdiv; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const int id = m.num_vertices();
            m.vertices.push_back(((m.vertices[a] + m.vertices[b]) * 0.5).normalized());
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles = std::move(next);
    }
    return m;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace dpoint;
    const int subdiv = argc > 1 ? std::atoi(argv[1]) : 5;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;

    const TriMesh sphere = make_icosphere(subdiv);
    RngStream rng(1, 0);
    const CutResult cut = random_genus0_cut(sphere, rng);
    const auto frames = local_frames(cut.disk);
    const PlanarParam uv = tutte_embed(cut.disk);

    std::printf("mesh: %d vertices, %d triangles\n", cut.disk.num_vertices(),
                cut.disk.num_triangles());
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif

    const EnergyKind kind = EnergyKind::AmipsConformal;
    double sink = 0.0;
    const double e_par =
        time_ms([&] { sink += total_energy(cut.disk, frames, uv, kind); }, repeats);
    const double e_ser =
        time_ms([&] { sink += total_energy_serial(cut.disk, frames, uv, kind); }, repeats);

    Eigen::VectorXd grad;
    const double g_par =
        time_ms([&] { sink += energy_gradient(cut.disk, frames, uv, kind, grad); }, repeats);
    const double g_ser = time_ms(
        [&] { sink += energy_gradient_serial(cut.disk, frames, uv, kind, grad); }, repeats);

    std::printf("energy:    parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n", e_par,
                e_ser, e_ser / e_par);
    std::printf("gradient:  parallel %8.3f ms   serial %8.3f ms   speedup %.2fx\n", g_par,
                g_ser, g_ser / g_par);

    // results must agree exactly (serial reduction in the parallel path)
    const double a = total_energy(cut.disk, frames, uv, kind);
    const double b = total_energy_serial(cut.disk, frames, uv, kind);
    if (a != b) {
        std::printf("MISMATCH: parallel %.17g vs serial %.17g\n", a, b);
        return 1;
    }
    std::printf("parallel/serial results identical (%.17g)\n", a);
    (void)sink;
    return 0;
}
