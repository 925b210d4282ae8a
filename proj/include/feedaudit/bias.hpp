#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "feedaudit/types.hpp"

namespace feedaudit {

// Bias of one publisher at one bot: model-predicted occupancy minus the
// unfiltered baseline, with a bootstrap percentile interval around it.
struct BiasRow {
    std::string bot_id;
    std::string publisher_id;
    int k = 0;
    double n_model = 0.0;
    double n_unfiltered = 0.0;
    double bias = 0.0;
    double boot_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int replicates = 0;
    double level = 0.0;

    bool operator==(const BiasRow&) const = default;
};

struct ScatterRow {
    std::string bot_id;
    std::string publisher_id;
    double n_measured = 0.0;
    double n_model = 0.0;

    bool operator==(const ScatterRow&) const = default;
};

struct ScatterResult {
    std::vector<ScatterRow> rows;
    double mean_abs_deviation = 0.0;  // from the n_measured == n_model diagonal
    double max_abs_deviation = 0.0;
};

struct BootstrapParams {
    int replicates = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
    bool parallel = true;
};

// Little's-law occupancy predicted from the measured effective rates:
// N_j = rate_j * K / sum of rates, keyed by every publisher observed in the
// dataset; values sum to K. Throws when the bot saw no posts in the top K.
std::map<std::string, double> model_occupancy_from_measurements(const SnapshotSet& set,
                                                                const std::string& bot, int k);

// Model occupancy minus the unfiltered baseline (creation rates estimated
// from catalog count shares), keyed by the union of dataset and catalog
// publishers. A publisher missing from the catalog gets baseline 0.
std::map<std::string, double> bias(const SnapshotSet& set,
                                   const std::vector<PostRecord>& catalog,
                                   const std::string& bot, int k);

// Raw replicate matrix, one row per replicate, one column per publisher in
// the order of bias()'s keys. Replicate r draws its own RNG stream from
// derive_seed(seed, r): the serial and parallel paths produce identical
// matrices, and the serial one is kept as the reference for tests and the
// kernel benchmark.
std::vector<std::vector<double>> bootstrap_bias_replicates(
    const SnapshotSet& set, const std::vector<PostRecord>& catalog, const std::string& bot,
    int k, int replicates, std::uint64_t seed, bool parallel);

// Full report for one bot: point estimates plus replicate mean and the
// percentile interval at the requested level (linear interpolation between
// order statistics at index (B-1)*q).
std::vector<BiasRow> bootstrap_bias(const SnapshotSet& set,
                                    const std::vector<PostRecord>& catalog,
                                    const std::string& bot, int k,
                                    const BootstrapParams& params);

// Measured occupancy against the model prediction, one row per
// (bot, observed publisher), with summary deviations from the diagonal.
ScatterResult validation_scatter(const SnapshotSet& set, int k);

}  // namespace feedaudit
