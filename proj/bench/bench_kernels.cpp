// Times the serial (edge scatter) and OpenMP (row gather) FCT kernels on a
// structured triangulation and reports the largest difference between them.
//
//   bench_kernels [cells_per_side] [repetitions]

#include "rfct/kernels.hpp"
#include "rfct/mesh.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <vector>

using namespace rfct;

namespace {

double best_of(int reps, const std::function<void()>& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

void report(const char* name, double ts, double tp, double diff) {
    std::printf("%-16s %12.3e %12.3e %8.2f %12.3e\n", name, ts, tp, ts / tp, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const int cells = argc > 1 ? std::atoi(argv[1]) : 400;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 10;
    if (cells < 1 || reps < 1) {
        std::fprintf(stderr, "usage: bench_kernels [cells_per_side >= 1] [repetitions >= 1]\n");
        return 2;
    }

    const Mesh mesh = generate_rect_triangulation(1.0, 1.0, 1.0 / cells, 1.0 / cells);
    const AdjacencyGraph g = build_adjacency(mesh);
    const int n = g.num_nodes();
    const int m = g.num_edges();

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> theta_dist(0.1, 0.4), flux_dist(-1.0, 1.0);
    std::vector<double> theta_low(n), theta_old(n), lumped(n, 1.0 / (n - 1)), flux(m);
    for (auto& v : theta_low) v = theta_dist(rng);
    for (auto& v : theta_old) v = theta_dist(rng);
    for (auto& v : flux) v = 1e-3 * flux_dist(rng);
    const double dt = 1e-3;

    std::vector<SoilMaterial> materials{SoilMaterial(RetentionModel::van_genuchten(3.35, 2.0), 0.102,
                                                     0.368, ConductivityTensor::isotropic(7.967))};
    std::vector<int> node_zone(n, 0);
    std::vector<double> psi_init(n, -1.0), theta_target(n);
    for (int i = 0; i < n; ++i) theta_target[i] = materials[0].moisture_content(-0.5 - 5.0 * theta_low[i]);

    std::printf("mesh %dx%d cells: %d nodes, %d edges, %d threads, best of %d\n", cells, cells, n, m,
                omp_get_max_threads(), reps);
    std::printf("%-16s %12s %12s %8s %12s\n", "kernel", "serial [s]", "openmp [s]", "speedup",
                "max |diff|");

    std::vector<double> lo_s(n), hi_s(n), lo_p(n), hi_p(n);
    const double tb_s = best_of(reps, [&] { kernels::serial::bounds(g, theta_low, theta_old, lo_s, hi_s); });
    const double tb_p = best_of(reps, [&] { kernels::omp::bounds(g, theta_low, theta_old, lo_p, hi_p); });
    report("bounds", tb_s, tb_p, std::max(max_diff(lo_s, lo_p), max_diff(hi_s, hi_p)));

    const kernels::LimiterInput in{flux, lo_s, hi_s, theta_low, lumped, {}, dt};
    std::vector<double> rp_s(n), rm_s(n), rp_p(n), rm_p(n);
    const double tr_s = best_of(reps, [&] { kernels::serial::limiter_ratios(g, in, rp_s, rm_s); });
    const double tr_p = best_of(reps, [&] { kernels::omp::limiter_ratios(g, in, rp_p, rm_p); });
    report("limiter_ratios", tr_s, tr_p, std::max(max_diff(rp_s, rp_p), max_diff(rm_s, rm_p)));

    std::vector<double> a_s(m), a_p(m);
    const double ta_s = best_of(reps, [&] { kernels::serial::limiter_alpha(g, flux, rp_s, rm_s, a_s); });
    const double ta_p = best_of(reps, [&] { kernels::omp::limiter_alpha(g, flux, rp_s, rm_s, a_p); });
    report("limiter_alpha", ta_s, ta_p, max_diff(a_s, a_p));

    std::vector<double> c_s(n), c_p(n);
    const double tc_s = best_of(reps, [&] { kernels::serial::correction(g, theta_low, flux, a_s, lumped, dt, c_s); });
    const double tc_p = best_of(reps, [&] { kernels::omp::correction(g, theta_low, flux, a_s, lumped, dt, c_p); });
    report("correction", tc_s, tc_p, max_diff(c_s, c_p));

    std::vector<double> p_s(n), p_p(n);
    const double tp_s = best_of(reps, [&] { kernels::serial::recover(materials, node_zone, theta_target, psi_init, p_s); });
    const double tp_p = best_of(reps, [&] { kernels::omp::recover(materials, node_zone, theta_target, psi_init, p_p); });
    report("recover", tp_s, tp_p, max_diff(p_s, p_p));

    std::vector<double> th_s(n), th_p(n);
    const double tm_s = best_of(reps, [&] { kernels::serial::moisture(materials, node_zone, p_s, th_s); });
    const double tm_p = best_of(reps, [&] { kernels::omp::moisture(materials, node_zone, p_s, th_p); });
    report("moisture", tm_s, tm_p, max_diff(th_s, th_p));
    return 0;
}
