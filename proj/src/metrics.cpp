#include "feedaudit/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

struct PublisherStats {
    std::int64_t impressions = 0;
    std::int64_t visible_snapshots = 0;
    std::unordered_set<std::string> unique_posts;
};

std::map<std::string, PublisherStats> collect_bot_stats(const std::vector<Snapshot>& snaps,
                                                        int k) {
    std::map<std::string, PublisherStats> stats;
    std::unordered_set<std::string> seen_here;
    for (const auto& snap : snaps) {
        seen_here.clear();
        for (const auto& e : snap.entries) {
            if (e.position > k) continue;
            auto& s = stats[e.publisher_id];
            s.impressions += 1;
            s.unique_posts.insert(e.post_id);
            if (seen_here.insert(e.publisher_id).second) s.visible_snapshots += 1;
        }
    }
    return stats;
}

void check_k(int k) {
    if (k < 1) throw std::domain_error("K must be >= 1");
}

std::vector<ExposureRow> exposure_rows_for_bot(const SnapshotSet& set,
                                               const std::string& bot, int k) {
    const auto& snaps = set.snapshots_for(bot);
    const auto stats = collect_bot_stats(snaps, k);
    const auto s_count = static_cast<std::int64_t>(snaps.size());
    const auto s_double = static_cast<double>(s_count);

    std::vector<ExposureRow> rows;
    rows.reserve(set.publishers.size());
    for (const auto& pub : set.publishers) {
        ExposureRow row;
        row.bot_id = bot;
        row.publisher_id = pub;
        row.k = k;
        row.snapshots = s_count;
        if (const auto it = stats.find(pub); it != stats.end()) {
            row.impressions = it->second.impressions;
            row.unique_posts = static_cast<std::int64_t>(it->second.unique_posts.size());
            row.occupancy = static_cast<double>(row.impressions) / s_double;
            row.visibility = static_cast<double>(it->second.visible_snapshots) / s_double;
        }
        row.normalized_occupancy = row.occupancy / static_cast<double>(k);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

double effective_rate(const SnapshotSet& set, const std::string& bot,
                      const std::string& publisher, int k) {
    check_k(k);
    const auto& snaps = set.snapshots_for(bot);
    std::unordered_set<std::string> unique;
    for (const auto& snap : snaps)
        for (const auto& e : snap.entries)
            if (e.position <= k && e.publisher_id == publisher) unique.insert(e.post_id);
    return static_cast<double>(unique.size()) / static_cast<double>(snaps.size());
}

double occupancy(const SnapshotSet& set, const std::string& bot,
                 const std::string& publisher, int k) {
    check_k(k);
    const auto& snaps = set.snapshots_for(bot);
    std::int64_t impressions = 0;
    for (const auto& snap : snaps)
        for (const auto& e : snap.entries)
            if (e.position <= k && e.publisher_id == publisher) impressions += 1;
    return static_cast<double>(impressions) / static_cast<double>(snaps.size());
}

double visibility(const SnapshotSet& set, const std::string& bot,
                  const std::string& publisher, int k) {
    check_k(k);
    const auto& snaps = set.snapshots_for(bot);
    std::int64_t visible = 0;
    for (const auto& snap : snaps) {
        for (const auto& e : snap.entries) {
            if (e.position <= k && e.publisher_id == publisher) {
                visible += 1;
                break;
            }
        }
    }
    return static_cast<double>(visible) / static_cast<double>(snaps.size());
}

std::vector<ExposureRow> exposure_table_serial(const SnapshotSet& set, int k) {
    check_k(k);
    std::vector<ExposureRow> rows;
    rows.reserve(set.bot_ids.size() * set.publishers.size());
    for (const auto& bot : set.bot_ids) {
        auto bot_rows = exposure_rows_for_bot(set, bot, k);
        rows.insert(rows.end(), std::make_move_iterator(bot_rows.begin()),
                    std::make_move_iterator(bot_rows.end()));
    }
    return rows;
}

std::vector<ExposureRow> exposure_table(const SnapshotSet& set, int k) {
    check_k(k);
    const std::size_t n_bots = set.bot_ids.size();
    const std::size_t n_pubs = set.publishers.size();
    std::vector<ExposureRow> rows(n_bots * n_pubs);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t b = 0; b < n_bots; ++b) {
        auto bot_rows = exposure_rows_for_bot(set, set.bot_ids[b], k);
        std::move(bot_rows.begin(), bot_rows.end(), rows.begin() + b * n_pubs);
    }
    return rows;
}

std::vector<CurvePoint> occupancy_curve(const SnapshotSet& set, const std::string& bot,
                                        int k_max) {
    if (k_max < 1) throw std::domain_error("occupancy_curve: K_max must be >= 1");
    const auto& snaps = set.snapshots_for(bot);
    const auto s_double = static_cast<double>(snaps.size());

    // impressions_by_position[pub][p-1] counts entries of pub at position p;
    // the curve at K is the prefix sum up to K.
    std::map<std::string, std::vector<std::int64_t>> by_position;
    for (const auto& snap : snaps) {
        for (const auto& e : snap.entries) {
            if (e.position > k_max) continue;
            auto& hist = by_position[e.publisher_id];
            if (hist.empty()) hist.assign(static_cast<std::size_t>(k_max), 0);
            hist[static_cast<std::size_t>(e.position - 1)] += 1;
        }
    }

    std::vector<CurvePoint> points;
    points.reserve(by_position.size() * static_cast<std::size_t>(k_max));
    for (const auto& [pub, hist] : by_position) {
        std::int64_t cumulative = 0;
        for (int k = 1; k <= k_max; ++k) {
            cumulative += hist[static_cast<std::size_t>(k - 1)];
            points.push_back(
                {k, pub, static_cast<double>(cumulative) / s_double / static_cast<double>(k)});
        }
    }
    return points;
}

}  // namespace feedaudit
