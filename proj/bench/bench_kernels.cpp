// Timing comparison between the serial reference kernels and their OpenMP
// counterparts: field sampling, Monte-Carlo volume, and speedline point
// evaluation.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pipediff/diffusermap.hpp"
#include "pipediff/io.hpp"
#include "pipediff/meanline.hpp"
#include "pipediff/mesh.hpp"

using namespace pipediff;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double timed(const F& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds(t0);
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3f s   parallel %8.3f s   speedup %.2fx\n", name, serial,
                parallel, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel kernels run serially\n");
#endif
    const std::string data = PIPEDIFF_DATA_DIR;
    const PipeDiffuserDesign design = load_design(data + "/designs/p2.json");
    const StageConfig config = load_stage_config(data + "/stage_baseline.json");
    const DerivedGeometry derived = derive_geometry(design);
    const DiffuserSolid solid(design, derived);

    {
        const GridSpec grid = grid_for_solid(solid, 10.0);
        std::printf("field sampling grid: %d x %d x %d\n", grid.nx, grid.ny, grid.nz);
        std::vector<double> a, b;
        const double ts = timed([&] { a = sample_grid_serial(solid, grid); });
        const double tp = timed([&] { b = sample_grid_parallel(solid, grid); });
        report("sdf sampling", ts, tp);
        std::printf("  identical: %s\n", a == b ? "yes" : "NO");
    }
    {
        const std::uint64_t n = 4'000'000;
        double vs = 0, vp = 0;
        const double ts = timed([&] { vs = monte_carlo_volume_serial(solid, n, 42); });
        const double tp = timed([&] { vp = monte_carlo_volume_parallel(solid, n, 42); });
        report("monte-carlo volume", ts, tp);
        std::printf("  identical: %s (%.6g mm^3)\n", vs == vp ? "yes" : "NO", vs);
    }
    {
        const DiffuserMap map = synthetic_demo_map();
        const CpSource cp = CpSource::from_map(map);
        std::vector<double> mdots;
        for (int i = 0; i < 64; ++i) mdots.push_back(0.3 + 0.6 * i / 63.0);
        std::vector<StagePoint> a, b;
        const double ts =
            timed([&] { a = evaluate_points_serial(config, design, derived, cp, mdots, 1.0); });
        const double tp =
            timed([&] { b = evaluate_points_parallel(config, design, derived, cp, mdots, 1.0); });
        report("speedline points", ts, tp);
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i) {
            same = a[i].pr_tt == b[i].pr_tt && a[i].eta_tt == b[i].eta_tt;
        }
        std::printf("  identical: %s\n", same ? "yes" : "NO");
    }
    return 0;
}
