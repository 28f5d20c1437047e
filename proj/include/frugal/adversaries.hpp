#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "frugal/protocol.hpp"

namespace frugal {

enum class AdversaryKind { lower_bound, iid_bernoulli, fixed };

AdversaryKind parse_adversary(const std::string& name);
std::string adversary_name(AdversaryKind kind);

struct AdversaryConfig {
    AdversaryKind kind = AdversaryKind::iid_bernoulli;
    std::size_t K = 2;
    std::uint64_t seed = 0;
    // lower_bound parameters
    double eps = 0.1;
    std::size_t i_star = 0; // 0-based
    // iid_bernoulli parameters
    std::vector<double> means;
    // fixed parameters
    std::string file;
};

// Forecasts for the correlated hard instance, from one shared uniform
// draw: F_j = 1(u <= 1/2) for j != i_star, F_{i_star} = 1(u <= 1/2 - eps),
// outcome 0. The distinguished expert never errs alone, and its
// per-round expected squared-loss edge is exactly eps. Requires
// 0 < eps < 1/4 and i_star < K.
std::vector<double> lower_bound_forecasts(std::size_t K, double eps, std::size_t i_star, double u);

// F_i = 1(u_i < means_i), outcome 0; strict inequality is the contract.
std::vector<double> iid_bernoulli_forecasts(const std::vector<double>& means,
                                            const std::vector<double>& u_vector);

// Default hard-instance gap min{0.1, K/(900 m T)}; always below the
// 1/4 admissibility ceiling. T = 0 falls back to 0.1.
double default_eps(std::size_t K, std::size_t m, std::size_t T);

// Draws its per-round uniform from a substream keyed by (seed, t), so
// output depends only on (config, seed, t) -- never on the learner.
class LowerBoundAdversary final : public Adversary {
public:
    LowerBoundAdversary(std::size_t K, double eps, std::size_t i_star, std::uint64_t seed);
    std::size_t num_experts() const override { return K_; }
    void round(std::size_t t, std::vector<double>& forecasts, double& outcome) override;

private:
    std::size_t K_;
    double eps_;
    std::size_t i_star_;
    std::uint64_t seed_;
};

class BernoulliAdversary final : public Adversary {
public:
    BernoulliAdversary(std::vector<double> means, std::uint64_t seed);
    std::size_t num_experts() const override { return means_.size(); }
    void round(std::size_t t, std::vector<double>& forecasts, double& outcome) override;

private:
    std::vector<double> means_;
    std::uint64_t seed_;
};

// Replays rows recorded in a file; rounds past the end throw
// std::out_of_range.
class FixedAdversary final : public Adversary {
public:
    FixedAdversary(std::vector<std::vector<double>> forecasts, std::vector<double> outcomes);
    std::size_t num_experts() const override;
    std::size_t num_rounds() const { return outcomes_.size(); }
    void round(std::size_t t, std::vector<double>& forecasts, double& outcome) override;

private:
    std::vector<std::vector<double>> forecasts_;
    std::vector<double> outcomes_;
};

// Parses a delimiter-separated text file, one row per round: K
// forecast columns then one outcome column, separated by commas or
// whitespace. Lines starting with '#' are comments. Throws
// std::runtime_error naming the offending line on malformed input.
FixedAdversary load_fixed_sequence(const std::string& path);

// Instantiates the configured generator; validates parameters.
std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config);

} // namespace frugal
