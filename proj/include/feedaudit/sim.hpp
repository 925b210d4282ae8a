#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feedaudit/rng.hpp"
#include "feedaudit/types.hpp"

namespace feedaudit {

struct PublisherSpec {
    std::string id;
    double rate = 0.0;  // posts per time unit
};

struct BotSpec {
    std::string id;
    // Acceptance probability per publisher; a publisher missing from the map
    // is never accepted by this bot. Effective rate is acceptance * rate.
    std::map<std::string, double> acceptance;
};

struct SimConfig {
    std::vector<PublisherSpec> publishers;
    std::vector<BotSpec> bots;
    int k = 1;
    double snapshot_interval = 1.0;
    int snapshot_count = 1;
    // When unset, long enough for ~10*K accepted arrivals at the slowest bot.
    std::optional<double> warmup;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
    double resolved_warmup() const;
    double total_rate() const;
};

struct SimResult {
    std::vector<PostRecord> catalog;     // every published post, in time order
    std::vector<Snapshot> snapshots;     // time-major, bots in config order
    RateTable truth;                     // ground-truth rates, sorted by (bot, publisher)
};

// Poisson event times: strictly increasing, in (0, horizon]. rate 0 gives an
// empty list.
std::vector<double> generate_event_times(double rate, double horizon, Rng& rng);

// Superposed Poisson publishers, per-bot thinning, FIFO timelines of size K,
// snapshots at warmup + m*interval for m = 1..snapshot_count. Deterministic
// given the config (including seed).
SimResult run_simulation(const SimConfig& config);

}  // namespace feedaudit
