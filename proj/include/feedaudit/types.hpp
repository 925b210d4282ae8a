#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feedaudit/time.hpp"

namespace feedaudit {

// One published post, as listed in the publisher catalog.
struct PostRecord {
    std::string post_id;
    std::string publisher_id;
    TimeNs publication_time = 0;

    bool operator==(const PostRecord&) const = default;
};

// One feed position captured in a snapshot. likes/shares are carried through
// ingestion untouched; nothing downstream aggregates them.
struct SnapshotEntry {
    int position = 0;  // 1-based
    std::string post_id;
    std::string publisher_id;
    TimeNs publication_time = 0;
    std::optional<std::int64_t> likes;
    std::optional<std::int64_t> shares;

    bool operator==(const SnapshotEntry&) const = default;
};

// One timestamped capture of a bot's top-of-feed, entries ordered by position.
struct Snapshot {
    std::string bot_id;
    TimeNs snapshot_time = 0;
    std::vector<SnapshotEntry> entries;

    bool operator==(const Snapshot&) const = default;
};

// A snapshot dataset grouped by bot. `bot_ids` preserves first-appearance
// order; `publishers` is the sorted global set of publisher ids observed.
struct SnapshotSet {
    std::vector<std::string> bot_ids;
    std::map<std::string, std::vector<Snapshot>> per_bot;
    std::vector<std::string> publishers;

    static SnapshotSet group(std::vector<Snapshot> snapshots);

    // Throws LookupError for a bot not present in the dataset.
    const std::vector<Snapshot>& snapshots_for(const std::string& bot_id) const;
};

// Per-(bot, publisher) rate pair: the effective arrival rate into that bot's
// feed and the publisher's raw creation rate, both per time unit.
struct RateRow {
    std::string bot_id;
    std::string publisher_id;
    double effective_rate = 0.0;
    double creation_rate = 0.0;

    bool operator==(const RateRow&) const = default;
};

using RateTable = std::vector<RateRow>;

}  // namespace feedaudit
