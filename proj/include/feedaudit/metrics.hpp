#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feedaudit/types.hpp"

namespace feedaudit {

// Measured exposure of one publisher at one bot, restricted to the top K.
// impressions counts every appearance (once per snapshot); unique_posts
// counts distinct post ids. occupancy * snapshots == impressions exactly.
struct ExposureRow {
    std::string bot_id;
    std::string publisher_id;
    int k = 0;
    double occupancy = 0.0;
    double visibility = 0.0;
    double normalized_occupancy = 0.0;
    std::int64_t impressions = 0;
    std::int64_t unique_posts = 0;
    std::int64_t snapshots = 0;

    bool operator==(const ExposureRow&) const = default;
};

struct CurvePoint {
    int k = 0;
    std::string publisher_id;
    double normalized_occupancy = 0.0;

    bool operator==(const CurvePoint&) const = default;
};

// Measured effective arrival rate, in posts per snapshot: distinct posts of
// the publisher ever seen in the top K, divided by the snapshot count.
double effective_rate(const SnapshotSet& set, const std::string& bot,
                      const std::string& publisher, int k);

// Average number of the publisher's posts in the top K (impressions / snapshots).
double occupancy(const SnapshotSet& set, const std::string& bot,
                 const std::string& publisher, int k);

// Fraction of snapshots with at least one post of the publisher in the top K.
double visibility(const SnapshotSet& set, const std::string& bot,
                  const std::string& publisher, int k);

// One row per (bot, observed publisher) over the whole dataset. The parallel
// variant distributes bots across OpenMP threads; both produce identical rows
// (sorted by bot, then publisher).
std::vector<ExposureRow> exposure_table(const SnapshotSet& set, int k);
std::vector<ExposureRow> exposure_table_serial(const SnapshotSet& set, int k);

// Normalized occupancy per publisher for every K in 1..k_max at one bot,
// sorted by (publisher, K). Snapshots shorter than K contribute what they have.
std::vector<CurvePoint> occupancy_curve(const SnapshotSet& set, const std::string& bot,
                                        int k_max);

}  // namespace feedaudit
