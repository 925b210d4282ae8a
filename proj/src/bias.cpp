#include "feedaudit/bias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "feedaudit/errors.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/model.hpp"
#include "feedaudit/rng.hpp"

namespace feedaudit {

namespace {

void check_k(int k) {
    if (k < 1) throw std::domain_error("K must be >= 1");
}

CreationRates creation_rates_from_catalog(const std::vector<PostRecord>& catalog) {
    if (catalog.empty()) throw std::domain_error("catalog must be non-empty");
    std::map<std::string, double> counts;
    for (const auto& post : catalog) counts[post.publisher_id] += 1.0;
    return CreationRates::from_map(std::move(counts));
}

// Inputs of one bot's bootstrap, flattened for the replicate loop. The
// measured side resamples snapshots (each drawn snapshot contributes its
// per-publisher top-K counts); the catalog side resamples posts. At K = 1
// the measured side is exactly "resample the collected topmost posts".
struct BootstrapPrep {
    std::vector<std::string> publishers;            // union, sorted
    std::vector<std::vector<std::int32_t>> counts;  // [snapshot][publisher]
    std::vector<std::int32_t> catalog_publisher;    // [post] -> publisher index
};

BootstrapPrep prepare_bootstrap(const SnapshotSet& set,
                                const std::vector<PostRecord>& catalog,
                                const std::string& bot, int k,
                                const std::map<std::string, double>& point_bias) {
    BootstrapPrep prep;
    prep.publishers.reserve(point_bias.size());
    for (const auto& [pub, _] : point_bias) prep.publishers.push_back(pub);

    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < prep.publishers.size(); ++i)
        index.emplace(prep.publishers[i], static_cast<std::int32_t>(i));

    const auto& snaps = set.snapshots_for(bot);
    prep.counts.assign(snaps.size(), std::vector<std::int32_t>(prep.publishers.size(), 0));
    for (std::size_t s = 0; s < snaps.size(); ++s)
        for (const auto& e : snaps[s].entries)
            if (e.position <= k) prep.counts[s][index.at(e.publisher_id)] += 1;

    prep.catalog_publisher.reserve(catalog.size());
    for (const auto& post : catalog) prep.catalog_publisher.push_back(index.at(post.publisher_id));
    return prep;
}

std::vector<double> run_replicate(const BootstrapPrep& prep, int k, std::uint64_t seed,
                                  int replicate) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(replicate)));
    const std::size_t n_pubs = prep.publishers.size();
    const std::size_t n_snaps = prep.counts.size();
    const std::size_t n_posts = prep.catalog_publisher.size();

    std::vector<std::int64_t> measured(n_pubs, 0);
    for (std::size_t s = 0; s < n_snaps; ++s) {
        const auto& row = prep.counts[rng.index(n_snaps)];
        for (std::size_t p = 0; p < n_pubs; ++p) measured[p] += row[p];
    }
    std::vector<std::int64_t> created(n_pubs, 0);
    for (std::size_t m = 0; m < n_posts; ++m)
        created[prep.catalog_publisher[rng.index(n_posts)]] += 1;

    const auto measured_total =
        static_cast<double>(std::accumulate(measured.begin(), measured.end(), std::int64_t{0}));
    std::vector<double> bias_star(n_pubs, 0.0);
    for (std::size_t p = 0; p < n_pubs; ++p) {
        const double n_model = measured_total > 0.0
                                   ? static_cast<double>(measured[p]) / measured_total *
                                         static_cast<double>(k)
                                   : 0.0;
        const double n_unfiltered = static_cast<double>(created[p]) /
                                    static_cast<double>(n_posts) * static_cast<double>(k);
        bias_star[p] = n_model - n_unfiltered;
    }
    return bias_star;
}

// q-quantile of a sorted sample: linear interpolation between the order
// statistics bracketing index (n-1)*q.
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::map<std::string, double> model_occupancy_from_measurements(const SnapshotSet& set,
                                                                const std::string& bot,
                                                                int k) {
    check_k(k);
    const auto& snaps = set.snapshots_for(bot);

    std::map<std::string, std::unordered_set<std::string>> unique;
    for (const auto& snap : snaps)
        for (const auto& e : snap.entries)
            if (e.position <= k) unique[e.publisher_id].insert(e.post_id);

    const auto s_count = static_cast<double>(snaps.size());
    double rate_total = 0.0;
    std::map<std::string, double> rates;
    for (const auto& pub : set.publishers) {
        const auto it = unique.find(pub);
        const double rate =
            it == unique.end() ? 0.0 : static_cast<double>(it->second.size()) / s_count;
        rates[pub] = rate;
        rate_total += rate;
    }
    if (!(rate_total > 0.0))
        throw std::domain_error("degenerate dataset: bot \"" + bot +
                                "\" observed no posts in the top " + std::to_string(k));

    std::map<std::string, double> out;
    for (const auto& [pub, rate] : rates)
        out[pub] = rate * static_cast<double>(k) / rate_total;
    return out;
}

std::map<std::string, double> bias(const SnapshotSet& set,
                                   const std::vector<PostRecord>& catalog,
                                   const std::string& bot, int k) {
    check_k(k);
    const auto baseline = unfiltered_occupancy(creation_rates_from_catalog(catalog), k);
    const auto model = model_occupancy_from_measurements(set, bot, k);

    std::map<std::string, double> out;
    for (const auto& [pub, n_model] : model) {
        const auto it = baseline.find(pub);
        out[pub] = n_model - (it == baseline.end() ? 0.0 : it->second);
    }
    for (const auto& [pub, n_unfiltered] : baseline)
        if (!model.count(pub)) out[pub] = -n_unfiltered;
    return out;
}

std::vector<std::vector<double>> bootstrap_bias_replicates(
    const SnapshotSet& set, const std::vector<PostRecord>& catalog, const std::string& bot,
    int k, int replicates, std::uint64_t seed, bool parallel) {
    check_k(k);
    if (replicates < 1) throw std::domain_error("replicates must be >= 1");
    const auto point = bias(set, catalog, bot, k);
    const auto prep = prepare_bootstrap(set, catalog, bot, k, point);

    std::vector<std::vector<double>> matrix(static_cast<std::size_t>(replicates));
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (int r = 0; r < replicates; ++r)
            matrix[static_cast<std::size_t>(r)] = run_replicate(prep, k, seed, r);
    } else {
        for (int r = 0; r < replicates; ++r)
            matrix[static_cast<std::size_t>(r)] = run_replicate(prep, k, seed, r);
    }
    return matrix;
}

std::vector<BiasRow> bootstrap_bias(const SnapshotSet& set,
                                    const std::vector<PostRecord>& catalog,
                                    const std::string& bot, int k,
                                    const BootstrapParams& params) {
    check_k(k);
    if (params.replicates < 1) throw std::domain_error("replicates must be >= 1");
    if (!(params.level > 0.0 && params.level < 1.0))
        throw std::domain_error("confidence level must be in (0, 1)");

    const auto point = bias(set, catalog, bot, k);
    const auto baseline = unfiltered_occupancy(creation_rates_from_catalog(catalog), k);
    const auto model = model_occupancy_from_measurements(set, bot, k);
    const auto matrix = bootstrap_bias_replicates(set, catalog, bot, k, params.replicates,
                                                  params.seed, params.parallel);

    const double q_low = (1.0 - params.level) / 2.0;
    const double q_high = 1.0 - q_low;

    std::vector<BiasRow> rows;
    rows.reserve(point.size());
    std::size_t column = 0;
    std::vector<double> values(matrix.size());
    for (const auto& [pub, b] : point) {
        for (std::size_t r = 0; r < matrix.size(); ++r) values[r] = matrix[r][column];
        const double mean =
            std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        std::sort(values.begin(), values.end());

        BiasRow row;
        row.bot_id = bot;
        row.publisher_id = pub;
        row.k = k;
        const auto model_it = model.find(pub);
        row.n_model = model_it == model.end() ? 0.0 : model_it->second;
        const auto base_it = baseline.find(pub);
        row.n_unfiltered = base_it == baseline.end() ? 0.0 : base_it->second;
        row.bias = b;
        row.boot_mean = mean;
        row.ci_low = percentile_sorted(values, q_low);
        row.ci_high = percentile_sorted(values, q_high);
        row.replicates = params.replicates;
        row.level = params.level;
        rows.push_back(std::move(row));
        ++column;
    }
    return rows;
}

ScatterResult validation_scatter(const SnapshotSet& set, int k) {
    check_k(k);
    ScatterResult result;
    double sum_dev = 0.0;
    for (const auto& bot : set.bot_ids) {
        const auto model = model_occupancy_from_measurements(set, bot, k);
        for (const auto& pub : set.publishers) {
            ScatterRow row;
            row.bot_id = bot;
            row.publisher_id = pub;
            row.n_measured = occupancy(set, bot, pub, k);
            const auto it = model.find(pub);
            row.n_model = it == model.end() ? 0.0 : it->second;
            const double dev = std::abs(row.n_measured - row.n_model);
            sum_dev += dev;
            result.max_abs_deviation = std::max(result.max_abs_deviation, dev);
            result.rows.push_back(std::move(row));
        }
    }
    if (!result.rows.empty())
        result.mean_abs_deviation = sum_dev / static_cast<double>(result.rows.size());
    return result;
}

}  // namespace feedaudit
