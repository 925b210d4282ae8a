#include "feedaudit/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "feedaudit/errors.hpp"

namespace feedaudit {

namespace {

constexpr double kTotalConsistencyRel = 1e-12;
constexpr int kMaxChainSize = 10'000;

void validate_rate_map(const std::map<std::string, double>& rates, double total,
                       const char* what) {
    double sum = 0.0;
    for (const auto& [id, r] : rates) {
        if (!(r >= 0.0)) {
            throw std::domain_error(std::string(what) + ": rate for publisher \"" + id +
                                    "\" must be >= 0");
        }
        sum += r;
    }
    const double scale = std::max(std::abs(sum), std::abs(total));
    if (std::abs(sum - total) > kTotalConsistencyRel * std::max(scale, 1.0)) {
        std::ostringstream os;
        os << what << ": total " << total << " does not match the per-publisher sum " << sum;
        throw std::domain_error(os.str());
    }
}

void check_fifo_arguments(double lambda_j, double lambda_total, int k, const char* fn) {
    if (!(lambda_total > 0.0))
        throw std::domain_error(std::string(fn) + ": lambda_total must be > 0");
    if (!(lambda_j >= 0.0))
        throw std::domain_error(std::string(fn) + ": lambda_j must be >= 0");
    if (lambda_j > lambda_total)
        throw std::domain_error(std::string(fn) + ": lambda_j must be <= lambda_total");
    if (k < 1) throw std::domain_error(std::string(fn) + ": K must be >= 1");
}

}  // namespace

FeedRates FeedRates::from_map(std::map<std::string, double> rates) {
    FeedRates out;
    out.per_publisher = std::move(rates);
    for (const auto& [id, r] : out.per_publisher) out.total += r;
    out.validate();
    return out;
}

void FeedRates::validate() const { validate_rate_map(per_publisher, total, "FeedRates"); }

double FeedRates::excluding(const std::string& publisher_id) const {
    const auto it = per_publisher.find(publisher_id);
    const double own = it == per_publisher.end() ? 0.0 : it->second;
    return total - own;
}

CreationRates CreationRates::from_map(std::map<std::string, double> rates) {
    CreationRates out;
    out.per_publisher = std::move(rates);
    for (const auto& [id, r] : out.per_publisher) out.total += r;
    out.validate();
    return out;
}

void CreationRates::validate() const {
    validate_rate_map(per_publisher, total, "CreationRates");
}

double fifo_visibility(double lambda_j, double lambda_total, int k) {
    check_fifo_arguments(lambda_j, lambda_total, k, "fifo_visibility");
    // K=1 reduces to the occupancy lambda_j/lambda_total; computing it that
    // way keeps the identity with fifo_occupancy bit-exact.
    if (k == 1) return lambda_j / lambda_total;
    const double miss = (lambda_total - lambda_j) / lambda_total;
    return 1.0 - std::pow(miss, k);
}

double fifo_occupancy(double lambda_j, double lambda_total, int k) {
    check_fifo_arguments(lambda_j, lambda_total, k, "fifo_occupancy");
    return lambda_j * static_cast<double>(k) / lambda_total;
}

std::map<std::string, double> unfiltered_occupancy(const CreationRates& creation, int k) {
    creation.validate();
    if (k < 1) throw std::domain_error("unfiltered_occupancy: K must be >= 1");
    if (!(creation.total > 0.0))
        throw std::domain_error("unfiltered_occupancy: total creation rate must be > 0");
    std::map<std::string, double> out;
    for (const auto& [id, rate] : creation.per_publisher)
        out[id] = rate * static_cast<double>(k) / creation.total;
    return out;
}

StationaryDistribution ctmc_stationary(double lambda_j, double lambda_rest, int k) {
    if (!(lambda_j >= 0.0))
        throw std::domain_error("ctmc_stationary: lambda_j must be >= 0");
    if (!(lambda_rest >= 0.0))
        throw std::domain_error("ctmc_stationary: lambda_rest must be >= 0");
    if (lambda_j == 0.0 && lambda_rest == 0.0)
        throw std::domain_error("ctmc_stationary: lambda_j and lambda_rest cannot both be 0");
    if (k < 1) throw std::domain_error("ctmc_stationary: K must be >= 1");
    if (k > kMaxChainSize)
        throw std::domain_error("ctmc_stationary: K exceeds the supported dense-solve size");

    // States 1..K+1 (matrix index x-1). From every state an arrival of j
    // resets the topmost position to 1; a competing arrival pushes it from x
    // to x+1 while x <= K, and state K+1 absorbs competing arrivals.
    const int n = k + 1;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        if (x != 0) {
            q(x, 0) += lambda_j;
            q(x, x) -= lambda_j;
        }
        if (x < k) {
            q(x, x + 1) += lambda_rest;
            q(x, x) -= lambda_rest;
        }
    }

    // Solve pi ' Q = 0 with one balance row replaced by sum(pi) = 1.
    Eigen::MatrixXd a = q.transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
        std::ostringstream os;
        os << "ctmc_stationary: balance equations are singular or ill-conditioned "
              "(reciprocal condition estimate "
           << rcond << ")";
        throw NumericalError(os.str());
    }
    Eigen::VectorXd pi = lu.solve(b);

    StationaryDistribution out;
    out.probs.resize(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) out.probs[static_cast<std::size_t>(x)] = std::max(pi(x), 0.0);
    return out;
}

double ttl_visibility(double creation_j, double timer) {
    if (!(creation_j >= 0.0))
        throw std::domain_error("ttl_visibility: creation rate must be >= 0");
    if (!(timer >= 0.0)) throw std::domain_error("ttl_visibility: timer must be >= 0");
    return -std::expm1(-creation_j * timer);
}

double ttl_occupancy(double creation_j, double timer) {
    if (!(creation_j >= 0.0))
        throw std::domain_error("ttl_occupancy: creation rate must be >= 0");
    if (!(timer >= 0.0)) throw std::domain_error("ttl_occupancy: timer must be >= 0");
    return creation_j * timer;
}

double ttl_timer_for_capacity(const CreationRates& creation, int k) {
    creation.validate();
    if (k < 1) throw std::domain_error("ttl_timer_for_capacity: K must be >= 1");
    if (!(creation.total > 0.0))
        throw std::domain_error("ttl_timer_for_capacity: total creation rate must be > 0");
    return static_cast<double>(k) / creation.total;
}

}  // namespace feedaudit
