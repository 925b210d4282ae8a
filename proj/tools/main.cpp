#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "feedaudit/bias.hpp"
#include "feedaudit/errors.hpp"
#include "feedaudit/ingest.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/sim.hpp"

namespace {

using namespace feedaudit;

// 0 success, 1 validation/domain error, 2 I/O error.
template <typename Fn>
int run_guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

void require_k(int k) {
    if (k < 1) throw std::domain_error("K must be >= 1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FIFO news-feed modeling, simulation, measurement and bias audit"};
    app.require_subcommand(1);

    std::string config_path, snapshots_path, catalog_path, out_path;
    std::uint64_t seed = 0;
    int k = 1;
    int k_max = 1;
    int replicates = 1000;
    double level = 0.95;

    auto* simulate = app.add_subcommand(
        "simulate", "generate a synthetic dataset (snapshots, catalog, truth rates, manifest)");
    simulate->add_option("--config", config_path, "simulation config (JSON)")->required();
    simulate->add_option("--seed", seed, "RNG seed (64-bit)")->required();
    simulate->add_option("--out", out_path, "output directory")->required();

    auto* metrics = app.add_subcommand(
        "metrics", "measured exposure table (occupancy, visibility, rates) at a given K");
    metrics->add_option("--snapshots", snapshots_path, "snapshot file")->required();
    metrics->add_option("--k", k, "top-K window (default 1)");
    metrics->add_option("--out", out_path, "output report (CSV)")->required();

    auto* validate = app.add_subcommand(
        "validate", "model-predicted vs measured occupancy scatter at a given K");
    validate->add_option("--snapshots", snapshots_path, "snapshot file")->required();
    validate->add_option("--k", k, "top-K window (default 1)");
    validate->add_option("--out", out_path, "output report (CSV)")->required();

    auto* bias_cmd = app.add_subcommand(
        "bias", "bias against the unfiltered baseline with bootstrap confidence intervals");
    bias_cmd->add_option("--snapshots", snapshots_path, "snapshot file")->required();
    bias_cmd->add_option("--catalog", catalog_path, "catalog of all published posts")->required();
    bias_cmd->add_option("--k", k, "top-K window (default 1)");
    bias_cmd->add_option("--replicates", replicates, "bootstrap replicates (default 1000)");
    bias_cmd->add_option("--level", level, "confidence level (default 0.95)");
    bias_cmd->add_option("--seed", seed, "RNG seed (64-bit)")->required();
    bias_cmd->add_option("--out", out_path, "output report (CSV)")->required();

    auto* curve = app.add_subcommand(
        "curve", "normalized occupancy per publisher for every K in 1..K_max");
    curve->add_option("--snapshots", snapshots_path, "snapshot file")->required();
    curve->add_option("--k-max", k_max, "largest K (default 1)");
    curve->add_option("--out", out_path, "output report (CSV)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e) ? 1 : 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (simulate->parsed()) {
        return run_guarded([&] {
            SimConfig config = read_sim_config(config_path);
            config.seed = seed;
            generate_synthetic(config, out_path);
        });
    }
    if (metrics->parsed()) {
        return run_guarded([&] {
            require_k(k);
            const auto set = read_snapshots(snapshots_path);
            write_report(exposure_report(exposure_table(set, k)), out_path);
        });
    }
    if (validate->parsed()) {
        return run_guarded([&] {
            require_k(k);
            const auto set = read_snapshots(snapshots_path);
            const auto scatter = validation_scatter(set, k);
            write_report(scatter_report(scatter.rows, k), out_path);
            std::cout << "rows=" << scatter.rows.size()
                      << " mean_abs_deviation=" << format_value(scatter.mean_abs_deviation)
                      << " max_abs_deviation=" << format_value(scatter.max_abs_deviation)
                      << "\n";
        });
    }
    if (bias_cmd->parsed()) {
        return run_guarded([&] {
            require_k(k);
            const auto set = read_snapshots(snapshots_path);
            const auto catalog = read_catalog(catalog_path);

            std::set<std::string> catalog_pubs;
            for (const auto& post : catalog) catalog_pubs.insert(post.publisher_id);
            for (const auto& pub : set.publishers) {
                if (!catalog_pubs.count(pub))
                    std::cerr << "warning: publisher \"" << pub
                              << "\" appears in snapshots but not in the catalog; its "
                                 "unfiltered occupancy is taken as 0\n";
            }

            BootstrapParams params;
            params.replicates = replicates;
            params.level = level;
            params.seed = seed;
            std::vector<BiasRow> rows;
            for (const auto& bot : set.bot_ids) {
                auto bot_rows = bootstrap_bias(set, catalog, bot, k, params);
                rows.insert(rows.end(), bot_rows.begin(), bot_rows.end());
            }
            write_report(bias_report(rows), out_path);
        });
    }
    if (curve->parsed()) {
        return run_guarded([&] {
            if (k_max < 1) throw std::domain_error("K_max must be >= 1");
            const auto set = read_snapshots(snapshots_path);
            std::map<std::string, std::vector<CurvePoint>> per_bot;
            for (const auto& bot : set.bot_ids)
                per_bot[bot] = occupancy_curve(set, bot, k_max);
            write_report(curve_report(per_bot), out_path);
        });
    }
    return 1;
}
