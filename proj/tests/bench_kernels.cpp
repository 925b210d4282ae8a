// Compares the OpenMP kernels against their serial reference implementations
// on a mid-sized synthetic dataset and verifies that both produce identical
// results. Build target: bench_kernels (not part of ctest).

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "feedaudit/bias.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/sim.hpp"

using namespace feedaudit;

namespace {

template <typename Fn>
double time_seconds(Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main() {
    SimConfig config;
    config.publishers = {{"p1", 3.0}, {"p2", 2.0}, {"p3", 1.5}, {"p4", 1.0},
                         {"p5", 0.8}, {"p6", 0.5}};
    for (int b = 0; b < 8; ++b) {
        BotSpec bot{"bot" + std::to_string(b), {}};
        for (const auto& p : config.publishers)
            bot.acceptance[p.id] = (b % 2 == 0) ? 1.0 : 0.5;
        config.bots.push_back(bot);
    }
    config.k = 5;
    config.snapshot_interval = 2.0;
    config.snapshot_count = 4000;
    config.seed = 1234;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif

    std::printf("generating dataset (%d bots, %d snapshots, K=%d)...\n",
                static_cast<int>(config.bots.size()), config.snapshot_count, config.k);
    SimResult result = run_simulation(config);
    const auto set = SnapshotSet::group(std::move(result.snapshots));

    std::vector<ExposureRow> exposure_serial, exposure_parallel;
    const double t_exposure_serial =
        time_seconds([&] { exposure_serial = exposure_table_serial(set, config.k); });
    const double t_exposure_parallel =
        time_seconds([&] { exposure_parallel = exposure_table(set, config.k); });
    std::printf("exposure_table     serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n",
                t_exposure_serial * 1e3, t_exposure_parallel * 1e3,
                t_exposure_serial / t_exposure_parallel,
                exposure_serial == exposure_parallel ? "identical" : "MISMATCH");

    const int replicates = 4000;
    std::vector<std::vector<double>> boot_serial, boot_parallel;
    const double t_boot_serial = time_seconds([&] {
        boot_serial = bootstrap_bias_replicates(set, result.catalog, "bot0", 1, replicates,
                                                99, false);
    });
    const double t_boot_parallel = time_seconds([&] {
        boot_parallel = bootstrap_bias_replicates(set, result.catalog, "bot0", 1, replicates,
                                                  99, true);
    });
    std::printf("bootstrap (B=%d) serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n",
                replicates, t_boot_serial * 1e3, t_boot_parallel * 1e3,
                t_boot_serial / t_boot_parallel,
                boot_serial == boot_parallel ? "identical" : "MISMATCH");

    return (exposure_serial == exposure_parallel && boot_serial == boot_parallel) ? 0 : 1;
}
