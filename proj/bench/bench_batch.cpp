#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "finslerkit/catalog.hpp"
#include "finslerkit/holonomy.hpp"
#include "finslerkit/surface.hpp"

using namespace fk;

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// bench_batch [catalog entry] [points]
int main(int argc, char** argv) {
    const std::string name = argc > 1 ? argv[1] : "sphere2";
    const int count = argc > 2 ? std::atoi(argv[2]) : 64;
    const CatalogEntry& entry = catalog_get(name);
    const auto samples = sample_points(default_sampling(entry, 42, count));
    const Model model = instantiate(entry, samples);
    std::printf("%s, %d points, %d threads\n", name.c_str(), count, thread_count());

    bool identical = true;
    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
        const char* label = exec == Exec::Serial ? "serial  " : "parallel";
        SurfaceReport surface;
        HolonomySummary holonomy;
        const double ts = seconds([&] { surface = analyze_surface(*model.metric, model.spray, samples, {}, exec); });
        const double th = seconds([&] { holonomy = holonomy_analysis(model.spray, samples, {}, exec); });
        std::printf("%s  surface %8.3f s  holonomy %8.3f s  (%.2f ms/point)\n", label, ts, th,
                    1e3 * (ts + th) / count);
        static SurfaceReport ref_surface;
        static HolonomySummary ref_holonomy;
        if (exec == Exec::Serial) {
            ref_surface = surface;
            ref_holonomy = holonomy;
        } else {
            for (std::size_t i = 0; i < samples.size(); ++i) {
                identical = identical && surface.points[i].k == ref_surface.points[i].k &&
                            surface.points[i].bianchi_residual == ref_surface.points[i].bianchi_residual &&
                            holonomy.per_point[i].generators == ref_holonomy.per_point[i].generators;
            }
            identical = identical && surface.residuals == ref_surface.residuals;
        }
    }
    std::printf("serial and parallel results bitwise identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
