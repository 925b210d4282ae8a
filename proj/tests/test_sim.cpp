#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "feedaudit/errors.hpp"
#include "feedaudit/metrics.hpp"
#include "feedaudit/model.hpp"
#include "feedaudit/sim.hpp"

using namespace feedaudit;

namespace {

SimConfig two_publisher_config() {
    SimConfig config;
    config.publishers = {{"p1", 1.0}, {"p2", 1.0}};
    config.bots = {{"bot", {{"p1", 1.0}, {"p2", 1.0}}}};
    config.k = 1;
    config.snapshot_interval = 10.0;
    config.snapshot_count = 10'000;
    config.seed = 2024;
    return config;
}

}  // namespace

TEST_CASE("generate_event_times basics") {
    Rng rng(1);
    CHECK(generate_event_times(0.0, 100.0, rng).empty());
    CHECK_THROWS_AS(generate_event_times(-1.0, 10.0, rng), std::domain_error);

    const auto times = generate_event_times(2.0, 50.0, rng);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(times[i] > 0.0);
        CHECK(times[i] <= 50.0);
        if (i) CHECK(times[i] > times[i - 1]);
    }
}

TEST_CASE("generate_event_times is deterministic per seed") {
    Rng a(99), b(99), c(100);
    const auto ta = generate_event_times(3.0, 100.0, a);
    const auto tb = generate_event_times(3.0, 100.0, b);
    const auto tc = generate_event_times(3.0, 100.0, c);
    CHECK(ta == tb);
    CHECK(ta != tc);
}

TEST_CASE("generate_event_times hits the expected count") {
    // Mean of count/horizon over independent seeds approaches the rate.
    const double rate = 5.0;
    const double horizon = 10'000.0;
    double total = 0.0;
    const int runs = 20;
    for (int s = 0; s < runs; ++s) {
        Rng rng(derive_seed(42, static_cast<std::uint64_t>(s)));
        total += static_cast<double>(generate_event_times(rate, horizon, rng).size());
    }
    const double mean_rate = total / runs / horizon;
    CHECK(mean_rate == doctest::Approx(rate).epsilon(0.01));
}

TEST_CASE("run_simulation is deterministic given the config") {
    SimConfig config = two_publisher_config();
    config.snapshot_count = 500;
    const SimResult a = run_simulation(config);
    const SimResult b = run_simulation(config);
    CHECK(a.catalog == b.catalog);
    CHECK(a.snapshots == b.snapshots);
    CHECK(a.truth == b.truth);
}

TEST_CASE("sole publisher fills every snapshot") {
    SimConfig config;
    config.publishers = {{"solo", 2.0}};
    config.bots = {{"bot", {{"solo", 1.0}}}};
    config.k = 4;
    config.snapshot_interval = 5.0;
    config.snapshot_count = 100;
    config.seed = 7;

    const SimResult result = run_simulation(config);
    REQUIRE(result.snapshots.size() == 100);
    for (const auto& snap : result.snapshots) {
        REQUIRE(snap.entries.size() == 4);
        for (const auto& e : snap.entries) CHECK(e.publisher_id == "solo");
    }
    const auto set = SnapshotSet::group(result.snapshots);
    CHECK(occupancy(set, "bot", "solo", 4) == doctest::Approx(4.0));
}

TEST_CASE("snapshots are FIFO ordered, newest on top") {
    SimConfig config = two_publisher_config();
    config.k = 5;
    config.snapshot_count = 200;
    const SimResult result = run_simulation(config);
    for (const auto& snap : result.snapshots) {
        for (std::size_t i = 1; i < snap.entries.size(); ++i) {
            CHECK(snap.entries[i].position == static_cast<int>(i) + 1);
            CHECK(snap.entries[i].publication_time < snap.entries[i - 1].publication_time);
        }
    }
}

TEST_CASE("full snapshots carry exactly K entries") {
    SimConfig config = two_publisher_config();
    config.k = 3;
    config.snapshot_count = 1000;
    const SimResult result = run_simulation(config);
    for (const auto& snap : result.snapshots) CHECK(snap.entries.size() == 3);
}

TEST_CASE("two equal publishers at K=1 split the top slot") {
    const SimConfig config = two_publisher_config();
    const SimResult result = run_simulation(config);
    const auto set = SnapshotSet::group(result.snapshots);
    // Closed form 0.5 with a 3-sigma Bernoulli tolerance at S = 10^4.
    CHECK(occupancy(set, "bot", "p1", 1) == doctest::Approx(0.5).epsilon(0.03));
    CHECK(std::abs(occupancy(set, "bot", "p1", 1) - 0.5) < 0.015);
}

TEST_CASE("thinning halves the effective rate") {
    SimConfig config;
    config.publishers = {{"p", 2.0}};
    config.bots = {{"bot", {{"p", 0.5}}}};
    config.k = 50;  // deep enough that nothing is evicted unseen between snapshots
    config.snapshot_interval = 1.0;
    config.snapshot_count = 10'000;
    config.seed = 5;

    const SimResult result = run_simulation(config);
    const auto set = SnapshotSet::group(result.snapshots);
    const double per_snapshot = effective_rate(set, "bot", "p", 50);
    const double per_time_unit = per_snapshot / config.snapshot_interval;
    CHECK(std::abs(per_time_unit - 1.0) < 0.02);

    REQUIRE(result.truth.size() == 1);
    CHECK(result.truth[0].effective_rate == doctest::Approx(1.0));
    CHECK(result.truth[0].creation_rate == doctest::Approx(2.0));
}

TEST_CASE("measured occupancy tracks the closed form per publisher") {
    SimConfig config;
    config.publishers = {{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};
    config.bots = {{"bot", {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}}};
    config.k = 2;
    config.snapshot_interval = 5.0;
    config.snapshot_count = 10'000;
    config.seed = 12;

    const SimResult result = run_simulation(config);
    const auto set = SnapshotSet::group(result.snapshots);
    for (const auto& [pub, rate] : std::map<std::string, double>{{"a", 3.0}, {"b", 2.0}, {"c", 1.0}}) {
        const double expected_n = fifo_occupancy(rate, 6.0, 2);
        const double expected_pi = fifo_visibility(rate, 6.0, 2);
        CHECK(occupancy(set, "bot", pub, 2) == doctest::Approx(expected_n).epsilon(0.02));
        CHECK(visibility(set, "bot", pub, 2) == doctest::Approx(expected_pi).epsilon(0.02));
    }
}

TEST_CASE("config invariants are enforced before any event") {
    SimConfig config = two_publisher_config();

    SimConfig no_pubs = config;
    no_pubs.publishers.clear();
    CHECK_THROWS_AS(run_simulation(no_pubs), ConfigError);

    SimConfig starved = config;
    starved.bots[0].acceptance = {{"p1", 0.0}};
    CHECK_THROWS_WITH_AS(run_simulation(starved), doctest::Contains("never fill"), ConfigError);

    SimConfig bad_prob = config;
    bad_prob.bots[0].acceptance["p1"] = 1.5;
    CHECK_THROWS_AS(run_simulation(bad_prob), ConfigError);

    SimConfig unknown_pub = config;
    unknown_pub.bots[0].acceptance["ghost"] = 0.5;
    CHECK_THROWS_WITH_AS(run_simulation(unknown_pub), doctest::Contains("ghost"), ConfigError);

    SimConfig bad_interval = config;
    bad_interval.snapshot_interval = 0.0;
    CHECK_THROWS_AS(run_simulation(bad_interval), ConfigError);

    SimConfig bad_warmup = config;
    bad_warmup.warmup = -1.0;
    CHECK_THROWS_AS(run_simulation(bad_warmup), ConfigError);

    SimConfig dup_bot = config;
    dup_bot.bots.push_back(dup_bot.bots[0]);
    CHECK_THROWS_AS(run_simulation(dup_bot), ConfigError);
}

TEST_CASE("catalog covers every snapshot entry") {
    SimConfig config = two_publisher_config();
    config.snapshot_count = 300;
    const SimResult result = run_simulation(config);
    std::set<std::string> catalog_ids;
    for (const auto& post : result.catalog) catalog_ids.insert(post.post_id);
    CHECK(catalog_ids.size() == result.catalog.size());
    for (const auto& snap : result.snapshots)
        for (const auto& e : snap.entries) CHECK(catalog_ids.count(e.post_id) == 1);
}
