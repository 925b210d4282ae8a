#pragma once

#include <map>
#include <string>
#include <vector>

namespace feedaudit {

// Per-publisher effective arrival rates into one feed, plus their total.
// Rates are unitless ratios as far as the FIFO formulas are concerned; the
// canonical unit in this project is posts per snapshot interval.
struct FeedRates {
    std::map<std::string, double> per_publisher;
    double total = 0.0;

    static FeedRates from_map(std::map<std::string, double> rates);
    void validate() const;

    // Aggregate rate of everyone but `publisher_id` (lambda_{-j}).
    double excluding(const std::string& publisher_id) const;
};

// Per-publisher post creation rates and their total.
struct CreationRates {
    std::map<std::string, double> per_publisher;
    double total = 0.0;

    static CreationRates from_map(std::map<std::string, double> rates);
    void validate() const;
};

// Stationary law of the topmost-post-position chain; probs[x-1] is the
// probability of state x, x in {1..K+1}, where K+1 means "off the feed".
struct StationaryDistribution {
    std::vector<double> probs;

    double visibility() const { return 1.0 - probs.back(); }
};

// Probability that a publisher with arrival rate lambda_j (out of
// lambda_total) has at least one post in the top K of a FIFO feed:
// 1 - ((lambda_total - lambda_j) / lambda_total)^K.
double fifo_visibility(double lambda_j, double lambda_total, int k);

// Expected number of that publisher's posts in the top K:
// lambda_j * K / lambda_total.
double fifo_occupancy(double lambda_j, double lambda_total, int k);

// Occupancy each publisher would get if every published post entered the
// feed; values sum to K and are the same for every bot.
std::map<std::string, double> unfiltered_occupancy(const CreationRates& creation, int k);

// Numerical route to the same visibility: build the (K+1)-state chain of the
// topmost position and solve its global balance equations with a dense LU.
// K up to 10^4 is supported (dense solve).
StationaryDistribution ctmc_stationary(double lambda_j, double lambda_rest, int k);

// TTL feed variant: each post lives for `timer` time units.
double ttl_visibility(double creation_j, double timer);
double ttl_occupancy(double creation_j, double timer);

// Timer that makes the expected TTL feed size equal K: T = K / total rate.
double ttl_timer_for_capacity(const CreationRates& creation, int k);

}  // namespace feedaudit
