#include "feedaudit/types.hpp"

#include <algorithm>
#include <set>

#include "feedaudit/errors.hpp"

namespace feedaudit {

SnapshotSet SnapshotSet::group(std::vector<Snapshot> snapshots) {
    SnapshotSet set;
    std::set<std::string> seen_pubs;
    for (auto& snap : snapshots) {
        for (const auto& e : snap.entries) seen_pubs.insert(e.publisher_id);
        auto [it, inserted] = set.per_bot.try_emplace(snap.bot_id);
        if (inserted) set.bot_ids.push_back(snap.bot_id);
        it->second.push_back(std::move(snap));
    }
    set.publishers.assign(seen_pubs.begin(), seen_pubs.end());
    return set;
}

const std::vector<Snapshot>& SnapshotSet::snapshots_for(const std::string& bot_id) const {
    const auto it = per_bot.find(bot_id);
    if (it == per_bot.end()) throw LookupError("unknown bot \"" + bot_id + "\"");
    return it->second;
}

}  // namespace feedaudit
