#include "frugal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "frugal/losses.hpp"
#include "frugal/rng.hpp"
#include "frugal/sumtree.hpp"

namespace frugal {

std::vector<std::size_t> default_checkpoints(std::size_t T) {
    std::vector<std::size_t> out;
    if (T == 0) return out;
    for (std::size_t c = 64; c <= T; c *= 2) {
        out.push_back(c);
        if (c > T / 2) break;
    }
    if (out.empty()) out.push_back(T);
    return out;
}

double slope_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("slope_fit: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("slope_fit: degenerate abscissae");
    return sxy / sxx;
}

std::pair<double, std::size_t> chi_square_gof(const std::vector<std::uint64_t>& counts,
                                              const std::vector<double>& probs) {
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square_gof: dimension mismatch");
    double total_prob = 0.0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!(probs[i] >= 0.0)) throw std::invalid_argument("chi_square_gof: negative probability");
        total_prob += probs[i];
        n += counts[i];
    }
    if (n == 0) throw std::invalid_argument("chi_square_gof: no observations");
    if (std::abs(total_prob - 1.0) > 1e-9)
        throw std::invalid_argument("chi_square_gof: probabilities must sum to 1");

    const double dn = static_cast<double>(n);
    double statistic = 0.0;
    std::size_t cells = 0;
    double pooled_expected = 0.0;
    double pooled_observed = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = dn * probs[i];
        if (expected >= 5.0) {
            const double d = static_cast<double>(counts[i]) - expected;
            statistic += d * d / expected;
            ++cells;
        } else {
            pooled_expected += expected;
            pooled_observed += static_cast<double>(counts[i]);
        }
    }
    if (pooled_expected > 0.0) {
        const double d = pooled_observed - pooled_expected;
        statistic += d * d / pooled_expected;
        ++cells;
    } else if (pooled_observed > 0.0) {
        statistic = std::numeric_limits<double>::infinity();
    }
    const std::size_t dof = cells > 0 ? cells - 1 : 0;
    return {statistic, dof};
}

double nearest_rank_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("nearest_rank_quantile: empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("nearest_rank_quantile: q in (0,1]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank == 0) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

namespace {

void validate_experiment(const ExperimentConfig& config) {
    validate_config(config.game);
    if (config.trials == 0) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (!(config.delta > 0.0 && config.delta < 1.0))
        throw std::invalid_argument("ExperimentConfig: delta must lie in (0,1)");
    for (std::size_t j = 0; j < config.checkpoints.size(); ++j) {
        if (config.checkpoints[j] > config.game.T)
            throw std::invalid_argument("ExperimentConfig: checkpoint beyond horizon");
        if (j > 0 && config.checkpoints[j] <= config.checkpoints[j - 1])
            throw std::invalid_argument("ExperimentConfig: checkpoints must increase");
    }
}

// One seeded game, recording regret at each checkpoint; O(K) memory.
void run_trial(const ExperimentConfig& config, const std::vector<std::size_t>& checkpoints,
               std::size_t trial, std::vector<double>& regrets) {
    const std::uint64_t trial_seed = derive_seed(config.master_seed, "trial", trial);
    SplitMix64 rng(derive_seed(trial_seed, "learner", 0));

    AdversaryConfig adversary_config = config.adversary;
    adversary_config.K = config.game.K;
    adversary_config.seed = derive_seed(trial_seed, "adversary", 0);
    auto adversary = make_adversary(adversary_config);
    if (adversary->num_experts() != config.game.K)
        throw std::invalid_argument("run_experiment: adversary K mismatch");
    auto learner = make_learner(config.algo, config.game);

    regrets.assign(checkpoints.size(), 0.0);
    double learner_total = 0.0;
    std::vector<double> expert_totals(config.game.K, 0.0);
    RoundRecord record;
    RoundScratch scratch;
    std::size_t next = 0;
    while (next < checkpoints.size() && checkpoints[next] == 0) {
        regrets[next] = 0.0;
        ++next;
    }
    for (std::size_t t = 1; t <= config.game.T && next < checkpoints.size(); ++t) {
        play_round_into(*learner, *adversary, squared_loss(), config.game, t, rng, record,
                        scratch);
        learner_total += record.learner_loss;
        for (std::size_t i = 0; i < expert_totals.size(); ++i)
            expert_totals[i] += record.expert_losses[i];
        if (t == checkpoints[next]) {
            const double best = *std::min_element(expert_totals.begin(), expert_totals.end());
            regrets[next] = learner_total - best;
            ++next;
        }
    }
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate_experiment(config);

    ExperimentResult result;
    result.checkpoints =
        config.checkpoints.empty() ? default_checkpoints(config.game.T) : config.checkpoints;

    // Open outputs before simulating so path errors surface first.
    std::ofstream csv_out, json_out;
    if (!config.out_prefix.empty()) {
        csv_out.open(config.out_prefix + ".csv", std::ios::binary);
        if (!csv_out)
            throw std::runtime_error("run_experiment: cannot write " + config.out_prefix + ".csv");
        json_out.open(config.out_prefix + ".json", std::ios::binary);
        if (!json_out)
            throw std::runtime_error("run_experiment: cannot write " + config.out_prefix +
                                     ".json");
    }

    result.per_trial.assign(config.trials, {});

    // Trials are independent; their seeds depend only on the trial
    // index, so any schedule yields the same result.
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min<std::size_t>(workers, config.trials);

    std::atomic<std::size_t> cursor{0};
    std::mutex error_lock;
    std::exception_ptr first_error;
    auto body = [&]() {
        for (;;) {
            const std::size_t trial = cursor.fetch_add(1);
            if (trial >= config.trials) return;
            try {
                run_trial(config, result.checkpoints, trial, result.per_trial[trial]);
            } catch (...) {
                std::lock_guard<std::mutex> hold(error_lock);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    const std::size_t n_checkpoints = result.checkpoints.size();
    result.stats.resize(n_checkpoints);
    std::vector<double> column(config.trials);
    for (std::size_t j = 0; j < n_checkpoints; ++j) {
        for (std::size_t k = 0; k < config.trials; ++k) column[k] = result.per_trial[k][j];
        CheckpointStats& s = result.stats[j];
        s.checkpoint = result.checkpoints[j];
        s.mean = std::accumulate(column.begin(), column.end(), 0.0) /
                 static_cast<double>(config.trials);
        double ss = 0.0;
        for (double v : column) ss += (v - s.mean) * (v - s.mean);
        s.stderr_value = config.trials > 1
                             ? std::sqrt(ss / static_cast<double>(config.trials - 1)) /
                                   std::sqrt(static_cast<double>(config.trials))
                             : 0.0;
        s.quantile = nearest_rank_quantile(column, 1.0 - config.delta);
        s.median = nearest_rank_quantile(column, 0.5);
    }

    if (n_checkpoints >= 3) {
        std::vector<std::pair<double, double>> points;
        points.reserve(n_checkpoints);
        for (const CheckpointStats& s : result.stats)
            points.emplace_back(std::log(static_cast<double>(s.checkpoint)),
                                std::log(std::max(s.median, kRegretFloor)));
        result.exponent = slope_fit(points);
    } else {
        result.exponent = std::numeric_limits<double>::quiet_NaN();
    }

    if (!config.out_prefix.empty()) {
        csv_out << experiment_csv(result);
        json_out << experiment_json(config, result);
        if (!csv_out || !json_out)
            throw std::runtime_error("run_experiment: short write to " + config.out_prefix);
    }
    return result;
}

std::string experiment_csv(const ExperimentResult& result) {
    std::string out = "trial,checkpoint,regret\n";
    for (std::size_t k = 0; k < result.per_trial.size(); ++k)
        for (std::size_t j = 0; j < result.checkpoints.size(); ++j) {
            out += std::to_string(k);
            out += ',';
            out += std::to_string(result.checkpoints[j]);
            out += ',';
            append_double(out, result.per_trial[k][j]);
            out += '\n';
        }
    return out;
}

std::string experiment_json(const ExperimentConfig& config, const ExperimentResult& result) {
    nlohmann::ordered_json j;
    j["config"]["algo"] = algo_name(config.algo);
    j["config"]["K"] = config.game.K;
    j["config"]["p"] = config.game.p;
    j["config"]["m"] = config.game.m;
    j["config"]["ic"] = config.game.IC;
    j["config"]["T"] = config.game.T;
    j["config"]["lambda"] = config.game.lambda;
    j["config"]["trials"] = config.trials;
    j["config"]["seed"] = config.master_seed;
    j["config"]["delta"] = config.delta;
    j["config"]["checkpoints"] = result.checkpoints;
    nlohmann::ordered_json adv;
    adv["kind"] = adversary_name(config.adversary.kind);
    switch (config.adversary.kind) {
        case AdversaryKind::lower_bound:
            adv["eps"] = config.adversary.eps;
            adv["istar"] = config.adversary.i_star + 1;
            break;
        case AdversaryKind::iid_bernoulli:
            adv["means"] = config.adversary.means;
            break;
        case AdversaryKind::fixed:
            adv["file"] = config.adversary.file;
            break;
    }
    j["config"]["adversary"] = std::move(adv);
    j["generator"]["family"] = std::string(kGeneratorFamily);
    j["generator"]["version"] = kGeneratorVersion;
    j["checkpoints"] = nlohmann::ordered_json::array();
    for (const CheckpointStats& s : result.stats) {
        nlohmann::ordered_json row;
        row["checkpoint"] = s.checkpoint;
        row["mean"] = s.mean;
        row["stderr"] = s.stderr_value;
        row["quantile"] = s.quantile;
        row["median"] = s.median;
        j["checkpoints"].push_back(std::move(row));
    }
    j["exponent"] = result.exponent; // NaN serializes as null
    return j.dump(2) + "\n";
}

namespace {

struct CheckLog {
    std::ostream& out;
    std::size_t failures = 0;
    void record(const std::string& name, bool pass, const std::string& detail) {
        out << (pass ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
        if (!pass) ++failures;
    }
};

// Monte Carlo means of the unshifted estimates against the true losses.
void check_unbiasedness(CheckLog& log, std::uint64_t seed) {
    const std::size_t K = 6, m_tilde = 2, rounds = 100000;
    const std::vector<double> losses = {0.9, 0.1, 0.55, 0.3, 0.0, 1.0};
    std::vector<double> weights = {0.3, 0.05, 0.2, 0.15, 0.1, 0.2};
    WeightTree tree(weights);

    SplitMix64 rng(derive_seed(seed, "unbiased", 0));
    std::vector<double> sum3(K, 0.0), sumsq3(K, 0.0), sum4(K, 0.0), sumsq4(K, 0.0);
    std::vector<std::size_t> pool(K);
    for (std::size_t r = 0; r < rounds; ++r) {
        // Exploration-anchored family: anchor I from the law, U uniform.
        const std::size_t anchor = tree.sample(rng.uniform01());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t k = 0; k < m_tilde; ++k) {
            const std::size_t pick = k + uniform_index(rng, K - k);
            std::swap(pool[k], pool[pick]);
        }
        for (std::size_t i = 0; i < K; ++i) {
            const bool in_u = pool[0] == i || pool[1] == i;
            const auto [shifted, _] = pseudo_loss(in_u, losses[i], losses[anchor], K, m_tilde);
            const double estimate = shifted + losses[anchor];
            sum3[i] += estimate;
            sumsq3[i] += estimate * estimate;
        }
        // Coupled-pair family: anchor A from the law, target B uniform.
        const std::size_t a = tree.sample(rng.uniform01());
        const std::size_t b = uniform_index(rng, K);
        for (std::size_t i = 0; i < K; ++i) {
            const double shifted =
                b == i ? static_cast<double>(K) * (losses[i] - losses[a]) : 0.0;
            const double estimate = shifted + losses[a];
            sum4[i] += estimate;
            sumsq4[i] += estimate * estimate;
        }
    }
    const double dn = static_cast<double>(rounds);
    for (int family = 0; family < 2; ++family) {
        const auto& sum = family == 0 ? sum3 : sum4;
        const auto& sumsq = family == 0 ? sumsq3 : sumsq4;
        bool pass = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            const double mean = sum[i] / dn;
            const double var = std::max(0.0, sumsq[i] / dn - mean * mean);
            const double se = std::sqrt(var / dn);
            const double gap = std::abs(mean - losses[i]);
            worst = std::max(worst, se > 0 ? gap / se : gap);
            if (gap > 4.0 * se + 1e-12) pass = false;
        }
        log.record(family == 0 ? "unbiasedness (exploration-anchored)"
                               : "unbiasedness (coupled-pair)",
                   pass, "worst |mean-true|/stderr = " + std::to_string(worst));
    }
}

void check_sampling_laws(CheckLog& log, std::uint64_t seed) {
    const std::vector<double> law = {0.4, 0.25, 0.2, 0.1, 0.05};
    const std::size_t K = law.size(), draws = 100000;
    WeightTree tree(law);
    SplitMix64 rng(derive_seed(seed, "two-step", 0));
    std::vector<std::uint64_t> marginal(K, 0);
    std::vector<std::vector<std::uint64_t>> joint(K, std::vector<std::uint64_t>(K, 0));
    for (std::size_t r = 0; r < draws; ++r) {
        const std::size_t a = tree.sample(rng.uniform01());
        const std::size_t b = uniform_index(rng, K);
        const double ui = rng.uniform01();
        const double uj = rng.uniform01();
        std::size_t i = a, jdx = a;
        if (a != b) {
            const double qa = law[a] / (law[a] + law[b]);
            i = ui < qa ? a : b;
            jdx = uj < qa ? a : b;
        }
        ++marginal[i];
        ++joint[i][jdx];
    }
    const auto [stat, dof] = chi_square_gof(marginal, law);
    log.record("two-step sampler marginal", stat < 18.467,
               "chi-square " + std::to_string(stat) + " (dof " + std::to_string(dof) +
                   ", 99.9% cut 18.467)");

    bool joint_ok = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    const double dn = static_cast<double>(draws);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t jdx = 0; jdx < K; ++jdx) {
            const double phat = static_cast<double>(joint[i][jdx]) / dn;
            const double se = std::sqrt(std::max(phat * (1.0 - phat), 1.0 / dn) / dn);
            const double bound = law[i] * law[jdx] / static_cast<double>(K) - 3.0 * se;
            worst_margin = std::min(worst_margin, phat - bound);
            if (phat < bound) joint_ok = false;
        }
    log.record("two-step sampler joint lower bound", joint_ok,
               "worst empirical margin " + std::to_string(worst_margin));
}

void check_tree_vs_naive(CheckLog& log, std::uint64_t seed) {
    const std::size_t K = 1000, updates = 10000, grid = 10000;
    std::vector<double> weights(K, 1.0);
    WeightTree tree(weights);
    SplitMix64 rng(derive_seed(seed, "tree", 0));
    for (std::size_t r = 0; r < updates; ++r) {
        const std::size_t i = uniform_index(rng, K);
        const double factor = std::exp(1.5 * (rng.uniform01() - 0.5));
        tree.multiply_leaf(i, factor);
        weights[i] *= factor;
    }
    std::vector<double> cumulative(K);
    double running = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        running += weights[i];
        cumulative[i] = running;
    }
    bool index_ok = true;
    for (std::size_t g = 0; g < grid && index_ok; ++g) {
        const double u = static_cast<double>(g) / static_cast<double>(grid);
        const double z = running * u;
        std::size_t naive =
            std::upper_bound(cumulative.begin(), cumulative.end(), z) - cumulative.begin();
        if (naive >= K) naive = K - 1;
        while (weights[naive] == 0.0 && naive > 0) --naive;
        if (tree.sample(u) != naive) index_ok = false;
    }
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double reference = weights[i] / running;
        const double got = tree.prob(i);
        const double denom = std::max(std::abs(reference), 1e-300);
        worst_rel = std::max(worst_rel, std::abs(got - reference) / denom);
    }
    log.record("sum tree vs naive inverse-CDF", index_ok && worst_rel < 1e-9,
               std::string(index_ok ? "indices agree" : "index mismatch") +
                   ", worst prob relative error " + std::to_string(worst_rel));
}

void check_curvature(CheckLog& log, std::uint64_t seed) {
    SquaredLoss loss;
    SplitMix64 rng(derive_seed(seed, "curvature", 0));
    const auto samples = make_sample_triples(loss, 10000, rng);
    const std::size_t at8 = check_ec_membership(loss, 8.0, samples, 1e-12);
    log.record("midpoint-curvature class at c = 8", at8 == 0,
               std::to_string(at8) + " violations (expected 0; 8 is the sharp constant)");
    const std::size_t at16 = check_ec_membership(loss, 16.0, samples, 1e-12);
    log.record("membership monotone in c", at16 == 0,
               std::to_string(at16) + " violations at c = 16");
    const std::size_t concave = check_exp_concavity(loss, 0.5, samples, 1e-12);
    log.record("exp-concavity at eta = 1/(2B)", concave == 0,
               std::to_string(concave) + " violations");
    const std::size_t too_strong = check_exp_concavity(loss, 10.0, samples, 1e-12);
    log.record("exp-concavity fails for large eta", too_strong > 0,
               std::to_string(too_strong) + " violations at eta = 10 (expected > 0)");
}

} // namespace

std::size_t run_validation_suite(std::uint64_t seed, std::ostream& log_stream) {
    CheckLog log{log_stream};
    check_unbiasedness(log, seed);
    check_sampling_laws(log, seed);
    check_tree_vs_naive(log, seed);
    check_curvature(log, seed);
    return log.failures;
}

} // namespace frugal
