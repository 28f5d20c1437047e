#include "frugal/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace frugal {

void validate_config(const GameConfig& config) {
    if (config.K == 0) throw std::invalid_argument("GameConfig: K must be positive");
    if (config.p == 0 || config.p > config.K)
        throw std::invalid_argument("GameConfig: need 1 <= p <= K");
    if (config.m == 0 || config.m > config.K)
        throw std::invalid_argument("GameConfig: need 1 <= m <= K");
    if (config.IC && config.p > config.m)
        throw std::invalid_argument("GameConfig: inclusion condition requires p <= m");
    if (!(config.lambda > 0.0) || !std::isfinite(config.lambda))
        throw std::invalid_argument("GameConfig: lambda must be positive and finite");
}

namespace {

bool has_duplicate_or_bad_index(const std::vector<std::size_t>& idx, std::size_t K,
                                std::string& detail) {
    std::vector<std::size_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t v : sorted)
        if (v >= K) {
            detail = "index " + std::to_string(v) + " out of range for K=" + std::to_string(K);
            return true;
        }
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        detail = "repeated index";
        return true;
    }
    return false;
}

} // namespace

ActionCheck validate_action(const LearnerAction& action, const GameConfig& config) {
    std::string detail;
    if (has_duplicate_or_bad_index(action.S, config.K, detail))
        return {ActionViolation::domain, "S: " + detail};
    if (has_duplicate_or_bad_index(action.C, config.K, detail))
        return {ActionViolation::domain, "C: " + detail};
    if (action.S.empty())
        return {ActionViolation::size, "played set is empty"};
    if (action.S.size() > config.p)
        return {ActionViolation::size,
                "|S|=" + std::to_string(action.S.size()) + " exceeds p=" + std::to_string(config.p)};
    if (action.C.size() > config.m)
        return {ActionViolation::size,
                "|C|=" + std::to_string(action.C.size()) + " exceeds m=" + std::to_string(config.m)};
    if (config.IC)
        for (std::size_t i : action.S)
            if (std::find(action.C.begin(), action.C.end(), i) == action.C.end())
                return {ActionViolation::inclusion,
                        "expert " + std::to_string(i + 1) + " played but not observed"};
    if (action.weights.size() != action.S.size())
        return {ActionViolation::convexity, "weights not aligned with S"};
    double sum = 0.0;
    for (double w : action.weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            return {ActionViolation::convexity, "negative or non-finite weight"};
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        return {ActionViolation::convexity, "weights sum to " + std::to_string(sum)};
    return {};
}

RoundError::RoundError(std::size_t t, ActionCheck check)
    : std::runtime_error("invalid action at round " + std::to_string(t) + ": " + check.detail),
      t_(t),
      check_(std::move(check)) {}

const LossFunction& squared_loss() {
    static const SquaredLoss instance;
    return instance;
}

void play_round_into(Learner& learner, Adversary& adversary, const LossFunction& loss,
                     const GameConfig& config, std::size_t t, RandomSource& rng,
                     RoundRecord& out, RoundScratch& scratch) {
    Learner::StepOutcome outcome = learner.act(t, rng);
    ActionCheck check = validate_action(outcome.action, config);
    if (!check.ok()) throw RoundError(t, std::move(check));

    scratch.forecasts.resize(config.K);
    double y = 0.0;
    adversary.round(t, scratch.forecasts, y);

    double prediction = 0.0;
    for (std::size_t k = 0; k < outcome.action.S.size(); ++k)
        prediction += outcome.action.weights[k] * scratch.forecasts[outcome.action.S[k]];
    // An exact convex combination of in-domain forecasts stays in the
    // domain; only summation round-off can leave it (weights normalized
    // over many experts can sum to 1 +/- a few ulps), so clamp.
    const auto [lo, hi] = loss.domain();
    prediction = std::clamp(prediction, lo, hi);

    out.t = t;
    out.prediction = prediction;
    out.learner_loss = loss.eval(prediction, y);
    out.expert_losses.resize(config.K);
    for (std::size_t i = 0; i < config.K; ++i)
        out.expert_losses[i] = loss.eval(scratch.forecasts[i], y);

    scratch.observed.clear();
    for (std::size_t i : outcome.action.C) scratch.observed.emplace_back(i, out.expert_losses[i]);
    out.action = std::move(outcome.action);

    learner.observe(t, scratch.observed);
}

RoundRecord play_round(Learner& learner, Adversary& adversary, std::size_t t,
                       RandomSource& rng, const GameConfig& config, const LossFunction& loss) {
    RoundRecord record;
    RoundScratch scratch;
    play_round_into(learner, adversary, loss, config, t, rng, record, scratch);
    return record;
}

Trajectory run_game(Learner& learner, Adversary& adversary, const GameConfig& config,
                    RandomSource& rng, const LossFunction& loss) {
    validate_config(config);
    if (adversary.num_experts() != config.K)
        throw std::invalid_argument("run_game: adversary built for a different K");
    Trajectory trajectory;
    trajectory.config = config;
    trajectory.rounds.resize(config.T);
    RoundScratch scratch;
    for (std::size_t t = 1; t <= config.T; ++t)
        play_round_into(learner, adversary, loss, config, t, rng, trajectory.rounds[t - 1], scratch);
    return trajectory;
}

double regret(const Trajectory& trajectory) {
    if (trajectory.rounds.empty()) return 0.0;
    const std::size_t K = trajectory.config.K;
    double learner_total = 0.0;
    std::vector<double> expert_totals(K, 0.0);
    for (const RoundRecord& r : trajectory.rounds) {
        learner_total += r.learner_loss;
        for (std::size_t i = 0; i < K; ++i) expert_totals[i] += r.expert_losses[i];
    }
    return learner_total - *std::min_element(expert_totals.begin(), expert_totals.end());
}

namespace {

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void append_index_set(std::string& out, const std::vector<std::size_t>& idx) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) out += ';';
        out += std::to_string(idx[k] + 1);
    }
}

} // namespace

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,played_indices,observed_indices,prediction,learner_loss,best_expert_running_loss\n";
    std::vector<double> expert_totals(trajectory.config.K, 0.0);
    for (const RoundRecord& r : trajectory.rounds) {
        for (std::size_t i = 0; i < expert_totals.size(); ++i)
            expert_totals[i] += r.expert_losses[i];
        const double best = *std::min_element(expert_totals.begin(), expert_totals.end());
        out += std::to_string(r.t);
        out += ',';
        append_index_set(out, r.action.S);
        out += ',';
        append_index_set(out, r.action.C);
        out += ',';
        append_double(out, r.prediction);
        out += ',';
        append_double(out, r.learner_loss);
        out += ',';
        append_double(out, best);
        out += '\n';
    }
    return out;
}

} // namespace frugal
