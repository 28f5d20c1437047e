#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "frugal/protocol.hpp"
#include "frugal/sumtree.hpp"

namespace frugal {

enum class Algo { algo2, algo3, algo4, ewa, exp3, uniform };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);

// Cumulative statistics driving the exponential-weights law
//   p_i proportional to exp(-lambda * L_i + lambda^2 * V_i).
// The tree mirrors these weights up to a common positive factor.
struct LearnerState {
    std::size_t K = 0;
    double lambda = 0.0;
    std::vector<double> pseudo_losses; // cumulative shifted estimates L~
    std::vector<double> variances;     // cumulative squared estimates V^
    std::size_t m_tilde = 1;           // exploration set size max{m-2, 1}
};

// Reference O(K) computation of the law above, with max-subtraction
// for overflow safety. Throws std::invalid_argument on non-finite
// inputs or nonpositive lambda.
std::vector<double> ew_probabilities(const std::vector<double>& pseudo_losses,
                                     const std::vector<double>& variances, double lambda);

// Shifted estimate for one expert given the anchor's observed loss:
//   l~ = (K / m_tilde) * (loss_i - anchor_loss) when i is explored, else 0,
// and its square v^ = l~^2. Anchoring cancels in normalization, so the
// induced weights match the unshifted unbiased estimate's.
std::pair<double, double> pseudo_loss(bool in_exploration, double loss_i, double anchor_loss,
                                      std::size_t K, std::size_t m_tilde);

// Half the supremum of the admissible learning-rate interval for each
// algorithm, from the loss constants (eta, B):
//   algo2: (m-2)/(4K) * lambda_bar / 2           (requires m >= 3)
//   algo3: m_tilde/(128K) * lambda_bar / 2,  m_tilde = max{m-2, 1}
//   algo4: 1/(352 K^2) * lambda_bar / 2
// The sharpest known range for algo3 has coefficient (m-1)/(128K); we
// keep the conservative m_tilde form, which is never larger.
double default_lambda(Algo algo, std::size_t K, std::size_t m, double eta, double B);

// Midpoint-of-two-samples learner (the algo2/algo3 family).
//
// Each round: I and J are drawn iid from the exponential-weights law,
// the played set is {I, J} with weights (1/2, 1/2) (the singleton {I}
// with weight 1 when I = J), and an exploration set U of m_tilde
// experts is drawn uniformly without replacement. Observed set:
//   m >= 3:            C = {I, J} union U
//   m = 2, IC = False: C = {I} union U
// Updates touch only U (anchored at I's loss): L~_i += l~, V^_i += l~^2,
// and the tree leaf i is multiplied by exp(-lambda l~ + lambda^2 l~^2).
// The expectation-bound variant (algo2) freezes V^ at zero and needs
// m >= 3.
//
// Draw order per act(): one uniform for I, one for J, then exactly
// m_tilde partial-Fisher-Yates draws for U.
class MidpointEwLearner final : public Learner {
public:
    struct Options {
        // false reproduces the expectation-bound variant (algo2): no
        // variance correction, m >= 3 required.
        bool variance_correction = true;
        // Reference path: update every expert with the unshifted
        // estimate l^_i = l~_i + anchor (dense, O(K log K) per round).
        // The sampled index sequences are identical to the default
        // sparse path under the same draws.
        bool raw_updates = false;
    };

    explicit MidpointEwLearner(const GameConfig& config) : MidpointEwLearner(config, Options{}) {}
    MidpointEwLearner(const GameConfig& config, Options options);

    StepOutcome act(std::size_t t, RandomSource& rng) override;
    void observe(std::size_t t,
                 const std::vector<std::pair<std::size_t, double>>& observed) override;

    const LearnerState& state() const { return state_; }
    const WeightTree& tree() const { return tree_; }

private:
    GameConfig config_;
    Options options_;
    LearnerState state_;
    WeightTree tree_;
    std::vector<std::size_t> pool_; // Fisher-Yates scratch
    std::size_t last_I_ = kNoIndex;
    std::vector<std::size_t> last_U_;
};

// Coupled-pair learner for the fully constrained budget p = m = 2 with
// the inclusion condition.
//
// Each round: A is drawn from the exponential-weights law, B uniformly
// from [K]; C = {A, B} (a singleton when they collide). I and J are
// then drawn iid from the law restricted to C and renormalized, and the
// played midpoint of {I, J} is contained in C as required. Only B's
// statistics move, anchored at A's observed loss:
//   l~_B = K * (loss_B - loss_A), v^_B = l~_B^2.
//
// Draw order per act(): always four uniforms (A, B, I, J), even when
// A = B, so traces stay aligned across realizations.
class CoupledPairEwLearner final : public Learner {
public:
    explicit CoupledPairEwLearner(const GameConfig& config);

    StepOutcome act(std::size_t t, RandomSource& rng) override;
    void observe(std::size_t t,
                 const std::vector<std::pair<std::size_t, double>>& observed) override;

    const LearnerState& state() const { return state_; }
    const WeightTree& tree() const { return tree_; }

private:
    GameConfig config_;
    LearnerState state_;
    WeightTree tree_;
    std::size_t last_A_ = kNoIndex;
    std::size_t last_B_ = kNoIndex;
};

// Full-information exponentially weighted average: plays the whole
// expert set with the EW weights, observes every loss. Requires
// p = m = K. lambda plays the classical role (eta for an exp-concave
// loss gives constant regret).
class EwaFullInfoLearner final : public Learner {
public:
    explicit EwaFullInfoLearner(const GameConfig& config);

    StepOutcome act(std::size_t t, RandomSource& rng) override;
    void observe(std::size_t t,
                 const std::vector<std::pair<std::size_t, double>>& observed) override;

    const std::vector<double>& cumulative_losses() const { return losses_; }

private:
    GameConfig config_;
    std::vector<double> losses_;
    std::vector<double> zeros_;
};

// One-armed bandit baseline: samples a single arm from the EW law
// mixed with gamma-uniform exploration, observes that arm only, and
// applies the importance-weighted update L_i += loss_i / pi_i.
// Requires p = m = 1. gamma = min{1, sqrt(K ln K / T)} when the horizon
// is known (T > 0), else a per-epoch doubling schedule with
// gamma_t = min{1, sqrt(K ln K / 2^ceil(log2 t))}; config.lambda is the
// EW learning rate.
class Exp3Learner final : public Learner {
public:
    explicit Exp3Learner(const GameConfig& config);

    StepOutcome act(std::size_t t, RandomSource& rng) override;
    void observe(std::size_t t,
                 const std::vector<std::pair<std::size_t, double>>& observed) override;

    double gamma(std::size_t t) const;
    const std::vector<double>& cumulative_estimates() const { return estimates_; }

private:
    GameConfig config_;
    std::vector<double> estimates_;
    std::vector<double> zeros_;
    std::vector<double> mixed_; // scratch: exploration-mixed law
    double last_pi_ = 0.0;
};

// Plays a uniformly random pair (two iid index draws) with weights
// (1/2, 1/2); no learning. Requires p >= 2, m >= 2.
class UniformRandomLearner final : public Learner {
public:
    explicit UniformRandomLearner(const GameConfig& config);

    StepOutcome act(std::size_t t, RandomSource& rng) override;
    void observe(std::size_t t,
                 const std::vector<std::pair<std::size_t, double>>& observed) override;

private:
    GameConfig config_;
};

// Builds the learner for the algorithm id, enforcing its budget
// preconditions against the config. Throws std::invalid_argument on a
// mismatch (for example algo4 without p = m = 2, IC).
std::unique_ptr<Learner> make_learner(Algo algo, const GameConfig& config);

} // namespace frugal
