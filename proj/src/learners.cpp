#include "frugal/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frugal/losses.hpp"

namespace frugal {

Algo parse_algo(const std::string& name) {
    if (name == "algo2") return Algo::algo2;
    if (name == "algo3") return Algo::algo3;
    if (name == "algo4") return Algo::algo4;
    if (name == "ewa") return Algo::ewa;
    if (name == "exp3") return Algo::exp3;
    if (name == "uniform") return Algo::uniform;
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algo_name(Algo algo) {
    switch (algo) {
        case Algo::algo2: return "algo2";
        case Algo::algo3: return "algo3";
        case Algo::algo4: return "algo4";
        case Algo::ewa: return "ewa";
        case Algo::exp3: return "exp3";
        case Algo::uniform: return "uniform";
    }
    throw std::invalid_argument("unknown algorithm id");
}

std::vector<double> ew_probabilities(const std::vector<double>& pseudo_losses,
                                     const std::vector<double>& variances, double lambda) {
    if (pseudo_losses.empty() || pseudo_losses.size() != variances.size())
        throw std::invalid_argument("ew_probabilities: dimension mismatch");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("ew_probabilities: lambda must be positive and finite");
    const std::size_t K = pseudo_losses.size();
    std::vector<double> exponent(K);
    for (std::size_t i = 0; i < K; ++i) {
        if (!std::isfinite(pseudo_losses[i]) || !std::isfinite(variances[i]))
            throw std::invalid_argument("ew_probabilities: non-finite input");
        exponent[i] = -lambda * pseudo_losses[i] + lambda * lambda * variances[i];
    }
    const double top = *std::max_element(exponent.begin(), exponent.end());
    double total = 0.0;
    std::vector<double> probs(K);
    for (std::size_t i = 0; i < K; ++i) {
        probs[i] = std::exp(exponent[i] - top);
        total += probs[i];
    }
    for (double& v : probs) v /= total;
    return probs;
}

std::pair<double, double> pseudo_loss(bool in_exploration, double loss_i, double anchor_loss,
                                      std::size_t K, std::size_t m_tilde) {
    if (m_tilde == 0) throw std::invalid_argument("pseudo_loss: m_tilde must be positive");
    if (!in_exploration) return {0.0, 0.0};
    const double shifted =
        static_cast<double>(K) / static_cast<double>(m_tilde) * (loss_i - anchor_loss);
    return {shifted, shifted * shifted};
}

double default_lambda(Algo algo, std::size_t K, std::size_t m, double eta, double B) {
    if (K == 0) throw std::invalid_argument("default_lambda: K must be positive");
    const double bar = lambda_bar(eta, B);
    const double dK = static_cast<double>(K);
    switch (algo) {
        case Algo::algo2:
            if (m < 3) throw std::invalid_argument("default_lambda: algo2 needs m >= 3");
            return 0.5 * static_cast<double>(m - 2) / (4.0 * dK) * bar;
        case Algo::algo3: {
            if (m < 2) throw std::invalid_argument("default_lambda: algo3 needs m >= 2");
            const double m_tilde = static_cast<double>(m >= 3 ? m - 2 : 1);
            return 0.5 * m_tilde / (128.0 * dK) * bar;
        }
        case Algo::algo4:
            return 0.5 * bar / (352.0 * dK * dK);
        default:
            throw std::invalid_argument("default_lambda: no analytic default rate for " +
                                        algo_name(algo));
    }
}

namespace {

// Played set and weights for the midpoint of two sampled indices;
// collapses to a singleton when they coincide.
void midpoint_action(std::size_t i, std::size_t j, LearnerAction& action) {
    if (i == j) {
        action.S = {i};
        action.weights = {1.0};
    } else {
        action.S = {i, j};
        action.weights = {0.5, 0.5};
    }
}

void push_unique(std::vector<std::size_t>& v, std::size_t x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

} // namespace

MidpointEwLearner::MidpointEwLearner(const GameConfig& config, Options options)
    : config_(config), options_(options), tree_(std::vector<double>(config.K, 1.0)) {
    validate_config(config);
    if (config.p != 2)
        throw std::invalid_argument("MidpointEwLearner: requires play budget p = 2");
    if (options.variance_correction) {
        if (config.m < 3 && !(config.m == 2 && !config.IC))
            throw std::invalid_argument(
                "MidpointEwLearner: needs m >= 3, or m = 2 without the inclusion condition");
    } else {
        if (config.m < 3)
            throw std::invalid_argument(
                "MidpointEwLearner: the expectation-bound variant needs m >= 3");
    }
    state_.K = config.K;
    state_.lambda = config.lambda;
    state_.pseudo_losses.assign(config.K, 0.0);
    state_.variances.assign(config.K, 0.0);
    state_.m_tilde = config.m >= 3 ? config.m - 2 : 1;
    pool_.resize(config.K);
}

Learner::StepOutcome MidpointEwLearner::act(std::size_t, RandomSource& rng) {
    StepOutcome out;
    out.I = tree_.sample(rng.uniform01());
    out.J = tree_.sample(rng.uniform01());
    midpoint_action(out.I, out.J, out.action);

    // Partial Fisher-Yates: exactly m_tilde draws.
    std::iota(pool_.begin(), pool_.end(), std::size_t{0});
    out.U.resize(state_.m_tilde);
    for (std::size_t k = 0; k < state_.m_tilde; ++k) {
        const std::size_t r = k + uniform_index(rng, config_.K - k);
        std::swap(pool_[k], pool_[r]);
        out.U[k] = pool_[k];
    }

    if (config_.m >= 3) {
        out.action.C.push_back(out.I);
        push_unique(out.action.C, out.J);
    } else {
        out.action.C.push_back(out.I);
    }
    for (std::size_t u : out.U) push_unique(out.action.C, u);

    last_I_ = out.I;
    last_U_ = out.U;
    return out;
}

void MidpointEwLearner::observe(std::size_t,
                                const std::vector<std::pair<std::size_t, double>>& observed) {
    double anchor = 0.0;
    bool found = false;
    for (const auto& [i, loss] : observed)
        if (i == last_I_) {
            anchor = loss;
            found = true;
            break;
        }
    if (!found) throw std::logic_error("MidpointEwLearner: anchor loss missing from observation");

    const double lambda = state_.lambda;
    if (options_.raw_updates) {
        // Dense reference path: every expert gets the unshifted
        // estimate; the common exp(-lambda * anchor) factor cancels in
        // normalization, leaving the same law as the sparse path.
        for (std::size_t i = 0; i < state_.K; ++i) {
            const bool in_u = std::find(last_U_.begin(), last_U_.end(), i) != last_U_.end();
            double loss_i = anchor;
            if (in_u)
                for (const auto& [j, loss] : observed)
                    if (j == i) {
                        loss_i = loss;
                        break;
                    }
            auto [shifted, squared] = pseudo_loss(in_u, loss_i, anchor, state_.K, state_.m_tilde);
            const double raw = shifted + anchor;
            const double variance = options_.variance_correction ? squared : 0.0;
            state_.pseudo_losses[i] += raw;
            state_.variances[i] += variance;
            tree_.multiply_leaf(i, std::exp(-lambda * raw + lambda * lambda * variance));
        }
        return;
    }

    for (std::size_t u : last_U_) {
        double loss_u = 0.0;
        bool have = false;
        for (const auto& [i, loss] : observed)
            if (i == u) {
                loss_u = loss;
                have = true;
                break;
            }
        if (!have) throw std::logic_error("MidpointEwLearner: exploration loss missing");
        auto [shifted, squared] = pseudo_loss(true, loss_u, anchor, state_.K, state_.m_tilde);
        const double variance = options_.variance_correction ? squared : 0.0;
        state_.pseudo_losses[u] += shifted;
        state_.variances[u] += variance;
        tree_.multiply_leaf(u, std::exp(-lambda * shifted + lambda * lambda * variance));
    }
}

CoupledPairEwLearner::CoupledPairEwLearner(const GameConfig& config)
    : config_(config), tree_(std::vector<double>(config.K, 1.0)) {
    validate_config(config);
    if (config.p != 2 || config.m != 2 || !config.IC)
        throw std::invalid_argument(
            "CoupledPairEwLearner: requires p = 2, m = 2, and the inclusion condition");
    state_.K = config.K;
    state_.lambda = config.lambda;
    state_.pseudo_losses.assign(config.K, 0.0);
    state_.variances.assign(config.K, 0.0);
    state_.m_tilde = 1;
}

Learner::StepOutcome CoupledPairEwLearner::act(std::size_t, RandomSource& rng) {
    StepOutcome out;
    out.A = tree_.sample(rng.uniform01());
    out.B = uniform_index(rng, config_.K);
    const double uI = rng.uniform01();
    const double uJ = rng.uniform01();
    if (out.A == out.B) {
        out.I = out.A;
        out.J = out.A;
        out.action.C = {out.A};
    } else {
        // The law restricted to {A, B}: renormalization uses the raw
        // leaf weights, whose common factor cancels.
        const double wa = tree_.weight(out.A);
        const double wb = tree_.weight(out.B);
        const double qa = wa / (wa + wb);
        out.I = uI < qa ? out.A : out.B;
        out.J = uJ < qa ? out.A : out.B;
        out.action.C = {out.A, out.B};
    }
    midpoint_action(out.I, out.J, out.action);
    last_A_ = out.A;
    last_B_ = out.B;
    return out;
}

void CoupledPairEwLearner::observe(std::size_t,
                                   const std::vector<std::pair<std::size_t, double>>& observed) {
    double loss_a = 0.0, loss_b = 0.0;
    bool have_a = false, have_b = false;
    for (const auto& [i, loss] : observed) {
        if (i == last_A_) {
            loss_a = loss;
            have_a = true;
        }
        if (i == last_B_) {
            loss_b = loss;
            have_b = true;
        }
    }
    if (!have_a || !have_b)
        throw std::logic_error("CoupledPairEwLearner: anchor or target loss missing");

    const double shifted = static_cast<double>(state_.K) * (loss_b - loss_a);
    const double squared = shifted * shifted;
    const double lambda = state_.lambda;
    state_.pseudo_losses[last_B_] += shifted;
    state_.variances[last_B_] += squared;
    tree_.multiply_leaf(last_B_, std::exp(-lambda * shifted + lambda * lambda * squared));
}

EwaFullInfoLearner::EwaFullInfoLearner(const GameConfig& config) : config_(config) {
    validate_config(config);
    if (config.p != config.K || config.m != config.K)
        throw std::invalid_argument("EwaFullInfoLearner: requires p = m = K");
    losses_.assign(config.K, 0.0);
    zeros_.assign(config.K, 0.0);
}

Learner::StepOutcome EwaFullInfoLearner::act(std::size_t, RandomSource&) {
    StepOutcome out;
    out.action.S.resize(config_.K);
    std::iota(out.action.S.begin(), out.action.S.end(), std::size_t{0});
    out.action.weights = ew_probabilities(losses_, zeros_, config_.lambda);
    out.action.C = out.action.S;
    return out;
}

void EwaFullInfoLearner::observe(std::size_t,
                                 const std::vector<std::pair<std::size_t, double>>& observed) {
    for (const auto& [i, loss] : observed) losses_[i] += loss;
}

Exp3Learner::Exp3Learner(const GameConfig& config) : config_(config) {
    validate_config(config);
    if (config.p != 1 || config.m != 1)
        throw std::invalid_argument("Exp3Learner: requires p = m = 1");
    estimates_.assign(config.K, 0.0);
    zeros_.assign(config.K, 0.0);
    mixed_.assign(config.K, 0.0);
}

double Exp3Learner::gamma(std::size_t t) const {
    const double k = static_cast<double>(config_.K);
    double horizon;
    if (config_.T > 0) {
        horizon = static_cast<double>(config_.T);
    } else {
        // Unknown horizon: per-epoch doubling, epochs [2^j, 2^{j+1}).
        std::size_t epoch = 1;
        while (epoch < t) epoch *= 2;
        horizon = static_cast<double>(epoch);
    }
    if (config_.K < 2) return 0.0;
    return std::min(1.0, std::sqrt(k * std::log(k) / horizon));
}

Learner::StepOutcome Exp3Learner::act(std::size_t t, RandomSource& rng) {
    const std::vector<double> law = ew_probabilities(estimates_, zeros_, config_.lambda);
    const double g = gamma(t);
    const double k = static_cast<double>(config_.K);
    for (std::size_t i = 0; i < config_.K; ++i) mixed_[i] = (1.0 - g) * law[i] + g / k;

    const double u = rng.uniform01();
    double cum = 0.0;
    std::size_t arm = config_.K - 1;
    for (std::size_t i = 0; i < config_.K; ++i) {
        cum += mixed_[i];
        if (u < cum) {
            arm = i;
            break;
        }
    }
    last_pi_ = mixed_[arm];

    StepOutcome out;
    out.I = arm;
    out.action.S = {arm};
    out.action.weights = {1.0};
    out.action.C = {arm};
    return out;
}

void Exp3Learner::observe(std::size_t,
                          const std::vector<std::pair<std::size_t, double>>& observed) {
    for (const auto& [i, loss] : observed) estimates_[i] += loss / last_pi_;
}

UniformRandomLearner::UniformRandomLearner(const GameConfig& config) : config_(config) {
    validate_config(config);
    if (config.p < 2 || config.m < 2)
        throw std::invalid_argument("UniformRandomLearner: requires p >= 2 and m >= 2");
}

Learner::StepOutcome UniformRandomLearner::act(std::size_t, RandomSource& rng) {
    StepOutcome out;
    out.I = uniform_index(rng, config_.K);
    out.J = uniform_index(rng, config_.K);
    midpoint_action(out.I, out.J, out.action);
    out.action.C = out.action.S;
    return out;
}

void UniformRandomLearner::observe(std::size_t,
                                   const std::vector<std::pair<std::size_t, double>>&) {}

std::unique_ptr<Learner> make_learner(Algo algo, const GameConfig& config) {
    switch (algo) {
        case Algo::algo2: {
            MidpointEwLearner::Options options;
            options.variance_correction = false;
            return std::make_unique<MidpointEwLearner>(config, options);
        }
        case Algo::algo3:
            return std::make_unique<MidpointEwLearner>(config);
        case Algo::algo4:
            return std::make_unique<CoupledPairEwLearner>(config);
        case Algo::ewa:
            return std::make_unique<EwaFullInfoLearner>(config);
        case Algo::exp3:
            return std::make_unique<Exp3Learner>(config);
        case Algo::uniform:
            return std::make_unique<UniformRandomLearner>(config);
    }
    throw std::invalid_argument("make_learner: unknown algorithm id");
}

} // namespace frugal
