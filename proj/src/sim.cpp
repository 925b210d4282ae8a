#include "feedaudit/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>
#include <stdexcept>

#include "feedaudit/errors.hpp"

namespace feedaudit {

void SimConfig::validate() const {
    if (publishers.empty()) throw ConfigError("config: at least one publisher is required");
    std::set<std::string> pub_ids;
    for (const auto& p : publishers) {
        if (p.id.empty()) throw ConfigError("config: publisher id must be non-empty");
        if (!pub_ids.insert(p.id).second)
            throw ConfigError("config: duplicate publisher id \"" + p.id + "\"");
        if (!(p.rate >= 0.0))
            throw ConfigError("config: rate of publisher \"" + p.id + "\" must be >= 0");
    }
    if (!(total_rate() > 0.0))
        throw ConfigError("config: at least one publisher needs a rate > 0");
    if (bots.empty()) throw ConfigError("config: at least one bot is required");
    std::set<std::string> bot_ids;
    for (const auto& b : bots) {
        if (b.id.empty()) throw ConfigError("config: bot id must be non-empty");
        if (!bot_ids.insert(b.id).second)
            throw ConfigError("config: duplicate bot id \"" + b.id + "\"");
        bool feeds = false;
        for (const auto& [pub, prob] : b.acceptance) {
            if (!pub_ids.count(pub))
                throw ConfigError("config: bot \"" + b.id + "\" accepts unknown publisher \"" +
                                  pub + "\"");
            if (!(prob >= 0.0 && prob <= 1.0))
                throw ConfigError("config: acceptance of \"" + pub + "\" at bot \"" + b.id +
                                  "\" must be in [0, 1]");
        }
        for (const auto& p : publishers) {
            const auto it = b.acceptance.find(p.id);
            if (it != b.acceptance.end() && it->second > 0.0 && p.rate > 0.0) feeds = true;
        }
        if (!feeds)
            throw ConfigError("config: bot \"" + b.id +
                              "\" accepts no publisher with a positive rate; its timeline "
                              "would never fill");
    }
    if (k < 1) throw ConfigError("config: K must be >= 1");
    if (!(snapshot_interval > 0.0)) throw ConfigError("config: snapshot_interval must be > 0");
    if (snapshot_count < 1) throw ConfigError("config: snapshot_count must be >= 1");
    if (warmup && !(*warmup >= 0.0)) throw ConfigError("config: warmup must be >= 0");
}

double SimConfig::total_rate() const {
    double total = 0.0;
    for (const auto& p : publishers) total += p.rate;
    return total;
}

double SimConfig::resolved_warmup() const {
    if (warmup) return *warmup;
    // Time for ~10*K expected accepted arrivals at the slowest bot.
    double needed = 0.0;
    for (const auto& b : bots) {
        double lambda_i = 0.0;
        for (const auto& p : publishers) {
            const auto it = b.acceptance.find(p.id);
            if (it != b.acceptance.end()) lambda_i += it->second * p.rate;
        }
        needed = std::max(needed, 10.0 * static_cast<double>(k) / lambda_i);
    }
    return needed;
}

std::vector<double> generate_event_times(double rate, double horizon, Rng& rng) {
    if (!(rate >= 0.0)) throw std::domain_error("generate_event_times: rate must be >= 0");
    if (!(horizon > 0.0)) throw std::domain_error("generate_event_times: horizon must be > 0");
    std::vector<double> times;
    if (rate == 0.0) return times;
    times.reserve(static_cast<std::size_t>(rate * horizon * 1.1) + 16);
    double t = 0.0;
    for (;;) {
        t += rng.exponential(rate);
        if (t > horizon) break;
        times.push_back(t);
    }
    return times;
}

SimResult run_simulation(const SimConfig& config) {
    config.validate();

    const double warmup = config.resolved_warmup();
    const double horizon =
        warmup + config.snapshot_interval * static_cast<double>(config.snapshot_count);
    const double total = config.total_rate();

    Rng rng(config.seed);
    const std::vector<double> times = generate_event_times(total, horizon, rng);

    std::vector<double> cumulative;
    cumulative.reserve(config.publishers.size());
    double acc = 0.0;
    for (const auto& p : config.publishers) {
        acc += p.rate;
        cumulative.push_back(acc);
    }

    SimResult result;
    result.catalog.reserve(times.size());

    // Timelines hold catalog indices, newest first.
    std::vector<std::deque<std::size_t>> timelines(config.bots.size());

    std::size_t next_event = 0;
    const auto process_events_until = [&](double t_limit) {
        for (; next_event < times.size() && times[next_event] <= t_limit; ++next_event) {
            const double t = times[next_event];
            // Superposition: the publisher of each merged arrival is
            // categorical with weights proportional to the creation rates.
            const double u = rng.uniform01() * total;
            std::size_t pub = 0;
            while (pub + 1 < cumulative.size() && u >= cumulative[pub]) ++pub;

            char id_buf[24];
            std::snprintf(id_buf, sizeof id_buf, "post-%08zu", result.catalog.size() + 1);
            result.catalog.push_back(
                {id_buf, config.publishers[pub].id, ns_from_seconds(t)});
            const std::size_t post_index = result.catalog.size() - 1;

            // One acceptance draw per bot per arrival, bots in config order.
            for (std::size_t b = 0; b < config.bots.size(); ++b) {
                const auto it = config.bots[b].acceptance.find(config.publishers[pub].id);
                const double p = it == config.bots[b].acceptance.end() ? 0.0 : it->second;
                const double v = rng.uniform01();
                if (v < p) {
                    auto& line = timelines[b];
                    line.push_front(post_index);
                    if (line.size() > static_cast<std::size_t>(config.k)) line.pop_back();
                }
            }
        }
    };

    result.snapshots.reserve(static_cast<std::size_t>(config.snapshot_count) *
                             config.bots.size());
    for (int m = 1; m <= config.snapshot_count; ++m) {
        const double t_snap = warmup + config.snapshot_interval * static_cast<double>(m);
        process_events_until(t_snap);
        for (std::size_t b = 0; b < config.bots.size(); ++b) {
            Snapshot snap;
            snap.bot_id = config.bots[b].id;
            snap.snapshot_time = ns_from_seconds(t_snap);
            snap.entries.reserve(timelines[b].size());
            int position = 1;
            for (const std::size_t idx : timelines[b]) {
                const PostRecord& post = result.catalog[idx];
                snap.entries.push_back(
                    {position++, post.post_id, post.publisher_id, post.publication_time,
                     std::nullopt, std::nullopt});
            }
            result.snapshots.push_back(std::move(snap));
        }
    }

    for (const auto& b : config.bots) {
        for (const auto& p : config.publishers) {
            const auto it = b.acceptance.find(p.id);
            const double prob = it == b.acceptance.end() ? 0.0 : it->second;
            result.truth.push_back({b.id, p.id, prob * p.rate, p.rate});
        }
    }
    std::sort(result.truth.begin(), result.truth.end(), [](const RateRow& a, const RateRow& b) {
        return std::tie(a.bot_id, a.publisher_id) < std::tie(b.bot_id, b.publisher_id);
    });

    return result;
}

}  // namespace feedaudit
