#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "frugal/losses.hpp"
#include "frugal/rng.hpp"

namespace frugal {

// Sentinel for "no index" in outcome fields.
inline constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

// Game parameters. Expert indices are 0-based throughout the library;
// the CLI and CSV output use 1-based labels.
struct GameConfig {
    std::size_t K = 2;  // number of experts
    std::size_t p = 2;  // play budget: |S_t| <= p
    std::size_t m = 2;  // observation budget: |C_t| <= m
    bool IC = false;    // inclusion condition: S_t must be contained in C_t
    std::size_t T = 0;  // horizon
    double lambda = 1.0;
};

// Throws std::invalid_argument unless 1 <= p <= K, 1 <= m <= K,
// p <= m when IC, and lambda > 0.
void validate_config(const GameConfig& config);

// One round's committed decision: play the convex combination given by
// (S, weights), then observe the losses of C.
struct LearnerAction {
    std::vector<std::size_t> S;
    std::vector<double> weights; // aligned with S, sums to 1
    std::vector<std::size_t> C;
};

enum class ActionViolation {
    none,
    domain,    // index out of range or repeated
    size,      // |S| > p or |C| > m, or empty S
    inclusion, // IC demands S contained in C
    convexity, // weights negative, misaligned, or not summing to 1
};

struct ActionCheck {
    ActionViolation kind = ActionViolation::none;
    std::string detail;
    bool ok() const { return kind == ActionViolation::none; }
};

// Checks every LearnerAction invariant against the config; returns the
// first violation found rather than throwing.
ActionCheck validate_action(const LearnerAction& action, const GameConfig& config);

// Raised by play_round when the learner emits an invalid action.
class RoundError : public std::runtime_error {
public:
    RoundError(std::size_t t, ActionCheck check);
    std::size_t round() const { return t_; }
    const ActionCheck& check() const { return check_; }

private:
    std::size_t t_;
    ActionCheck check_;
};

// Everything the environment keeps about one round. expert_losses is
// accounting data for exact regret; learners never see it.
struct RoundRecord {
    std::size_t t = 0; // 1-based round index
    LearnerAction action;
    double prediction = 0.0;
    double learner_loss = 0.0;
    std::vector<double> expert_losses;
};

struct Trajectory {
    GameConfig config;
    std::vector<RoundRecord> rounds;
};

// What a learner is allowed to know: it commits to an action, then
// receives only the losses of its observed set.
class Learner {
public:
    virtual ~Learner() = default;

    // Sampled indices exposed alongside the action so traces can be
    // replayed and the sampling laws tested. Unused fields stay kNoIndex.
    struct StepOutcome {
        LearnerAction action;
        std::size_t I = kNoIndex;
        std::size_t J = kNoIndex;
        std::size_t A = kNoIndex;
        std::size_t B = kNoIndex;
        std::vector<std::size_t> U; // exploration set
    };

    virtual StepOutcome act(std::size_t t, RandomSource& rng) = 0;

    // observed holds (expert index, loss) for exactly the indices in
    // the action's C, in C order.
    virtual void observe(std::size_t t,
                         const std::vector<std::pair<std::size_t, double>>& observed) = 0;
};

// Oblivious forecast/outcome generator: output may depend on t and the
// adversary's own seed, never on learner behavior.
class Adversary {
public:
    virtual ~Adversary() = default;
    virtual std::size_t num_experts() const = 0;
    // Fills forecasts (size K) and the outcome for round t (1-based).
    virtual void round(std::size_t t, std::vector<double>& forecasts, double& outcome) = 0;
};

// Shared squared-loss instance for default arguments.
const LossFunction& squared_loss();

// Reusable buffers for the hot loop.
struct RoundScratch {
    std::vector<double> forecasts;
    std::vector<std::pair<std::size_t, double>> observed;
};

// Executes round t: obtains the action, validates it (throwing
// RoundError on violation) before any loss is disclosed, then forms the
// prediction, scores it, and shows the learner only the C-indexed
// losses. The record lands in out; scratch avoids reallocation.
void play_round_into(Learner& learner, Adversary& adversary, const LossFunction& loss,
                     const GameConfig& config, std::size_t t, RandomSource& rng,
                     RoundRecord& out, RoundScratch& scratch);

RoundRecord play_round(Learner& learner, Adversary& adversary, std::size_t t,
                       RandomSource& rng, const GameConfig& config,
                       const LossFunction& loss = squared_loss());

// T sequential rounds with deterministic rng consumption.
Trajectory run_game(Learner& learner, Adversary& adversary, const GameConfig& config,
                    RandomSource& rng, const LossFunction& loss = squared_loss());

// Cumulative learner loss minus the best fixed expert's cumulative
// loss; ties broken toward the lowest index; may be negative.
double regret(const Trajectory& trajectory);

// CSV with columns t, played_indices, observed_indices, prediction,
// learner_loss, best_expert_running_loss. Index sets are
// semicolon-joined 1-based lists; floats use 17 significant digits;
// LF line endings.
std::string trajectory_csv(const Trajectory& trajectory);

} // namespace frugal
