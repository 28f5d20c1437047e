// Acceptance gate for the simulator: one self-contained check per
// criterion, each printing a single [PASS]/[FAIL] line with the
// measured quantities. Run all criteria with no arguments, or one with
// --criterion N. Exit code 0 iff every selected criterion passed.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "frugal/adversaries.hpp"
#include "frugal/harness.hpp"
#include "frugal/learners.hpp"
#include "frugal/losses.hpp"
#include "frugal/protocol.hpp"
#include "frugal/rng.hpp"
#include "frugal/sumtree.hpp"
#include "test_support.hpp"

namespace {

using namespace frugal;
using frugal::testing::read_file;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// The stock stochastic instance: one expert with mean loss 0.4, the
// rest at 0.5 (gap 0.1), outcomes pinned at 0.
std::vector<double> gap_means(std::size_t K) {
    std::vector<double> means(K, 0.5);
    means[0] = 0.4;
    return means;
}

ExperimentConfig stock_experiment(Algo algo, std::size_t K, std::size_t p, std::size_t m,
                                  bool ic, std::size_t T, std::size_t trials, double lambda) {
    ExperimentConfig config;
    config.game.K = K;
    config.game.p = p;
    config.game.m = m;
    config.game.IC = ic;
    config.game.T = T;
    config.game.lambda = lambda;
    config.algo = algo;
    config.trials = trials;
    config.master_seed = 1;
    config.adversary.kind = AdversaryKind::iid_bernoulli;
    config.adversary.K = K;
    config.adversary.means = gap_means(K);
    return config;
}

// 1. Expectation-bound ceiling for the no-variance-term variant:
//    mean regret + 2 stderr must stay below log(K) / lambda.
Outcome criterion_1() {
    const double lambda = default_lambda(Algo::algo2, 10, 5, 0.5, 1.0);
    ExperimentConfig config = stock_experiment(Algo::algo2, 10, 2, 5, false, 20000, 200, lambda);
    config.checkpoints = {20000};
    const ExperimentResult result = run_experiment(config);
    const CheckpointStats& s = result.stats[0];
    const double value = s.mean + 2.0 * s.stderr_value;
    const double ceiling = std::log(10.0) / lambda;
    return {value <= ceiling,
            "mean+2se = " + fmt(value) + " vs ceiling log(K)/lambda = " + fmt(ceiling) +
                " at T = 20000, 200 trials"};
}

// 2. Constant-regret plateau: the median at 2^17 may exceed the median
//    at 2^13 by at most 25%.
Outcome criterion_2() {
    const double lambda = default_lambda(Algo::algo3, 10, 4, 0.5, 1.0);
    ExperimentConfig config =
        stock_experiment(Algo::algo3, 10, 2, 4, false, 131072, 50, lambda);
    config.checkpoints = {8192, 131072};
    const ExperimentResult result = run_experiment(config);
    const double early = result.stats[0].median;
    const double late = result.stats[1].median;
    return {late <= 1.25 * early, "median regret " + fmt(early) + " at 2^13, " + fmt(late) +
                                      " at 2^17 (allowed up to " + fmt(1.25 * early) + ")"};
}

// 3. Rate separation: fitted log-log exponent of the median regret
//    curve is flat (< 0.15) for the two-sample learner and near 1/2
//    (in [0.35, 0.65]) for the single-arm importance-weighted baseline.
Outcome criterion_3() {
    std::vector<std::size_t> checkpoints;
    for (std::size_t c = 1024; c <= 131072; c *= 2) checkpoints.push_back(c);

    const double lambda = default_lambda(Algo::algo3, 10, 4, 0.5, 1.0);
    ExperimentConfig flat = stock_experiment(Algo::algo3, 10, 2, 4, false, 131072, 50, lambda);
    flat.checkpoints = checkpoints;
    const double flat_slope = run_experiment(flat).exponent;

    const double rate = std::sqrt(2.0 * std::log(10.0) / (10.0 * 131072.0));
    ExperimentConfig bandit = stock_experiment(Algo::exp3, 10, 1, 1, false, 131072, 50, rate);
    bandit.checkpoints = checkpoints;
    const double bandit_slope = run_experiment(bandit).exponent;

    const bool pass =
        flat_slope < 0.15 && bandit_slope >= 0.35 && bandit_slope <= 0.65;
    return {pass, "two-sample exponent " + fmt(flat_slope) + " (need < 0.15), single-arm exponent " +
                      fmt(bandit_slope) + " (need in [0.35, 0.65])"};
}

// 4. Upper-tail control on the correlated hard instance: the 95th
//    percentile of the final regret is at most 3x its median.
Outcome criterion_4() {
    const double lambda = default_lambda(Algo::algo3, 10, 4, 0.5, 1.0);
    ExperimentConfig config =
        stock_experiment(Algo::algo3, 10, 2, 4, false, 131072, 100, lambda);
    config.adversary.kind = AdversaryKind::lower_bound;
    config.adversary.eps = 0.1;
    config.adversary.i_star = 0;
    config.adversary.means.clear();
    config.delta = 0.05;
    config.checkpoints = {131072};
    const ExperimentResult result = run_experiment(config);
    const double quantile = result.stats[0].quantile;
    const double median = result.stats[0].median;
    return {quantile <= 3.0 * median,
            "95th percentile " + fmt(quantile) + ", median " + fmt(median) +
                " (allowed up to " + fmt(3.0 * median) + ") over 100 trials"};
}

// 5. Coupled-pair plateau under the inclusion condition: median at 2^17
//    may exceed the median at 2^13 by at most 50%.
Outcome criterion_5() {
    const double lambda = default_lambda(Algo::algo4, 5, 2, 0.5, 1.0);
    ExperimentConfig config = stock_experiment(Algo::algo4, 5, 2, 2, true, 131072, 50, lambda);
    config.checkpoints = {8192, 131072};
    const ExperimentResult result = run_experiment(config);
    const double early = result.stats[0].median;
    const double late = result.stats[1].median;
    return {late <= 1.5 * early, "median regret " + fmt(early) + " at 2^13, " + fmt(late) +
                                     " at 2^17 (allowed up to " + fmt(1.5 * early) + ")"};
}

// 6. Unbiasedness of both loss-estimate families against a fixed law
//    and a fixed loss vector.
Outcome criterion_6() {
    const std::size_t K = 6, m_tilde = 2, rounds = 100000;
    const std::vector<double> losses = {0.9, 0.1, 0.55, 0.3, 0.0, 1.0};
    WeightTree tree(std::vector<double>{0.3, 0.05, 0.2, 0.15, 0.1, 0.2});
    SplitMix64 rng(derive_seed(1, "acceptance-unbiased", 0));

    std::vector<double> sum_a(K, 0.0), sq_a(K, 0.0), sum_b(K, 0.0), sq_b(K, 0.0);
    std::vector<std::size_t> pool(K);
    for (std::size_t r = 0; r < rounds; ++r) {
        // Family A: anchor sampled from the law, exploration set uniform.
        const std::size_t anchor = tree.sample(rng.uniform01());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t k = 0; k < m_tilde; ++k) {
            const std::size_t pick = k + uniform_index(rng, K - k);
            std::swap(pool[k], pool[pick]);
        }
        for (std::size_t i = 0; i < K; ++i) {
            const bool in_u = pool[0] == i || pool[1] == i;
            const double shifted = pseudo_loss(in_u, losses[i], losses[anchor], K, m_tilde).first;
            const double estimate = shifted + losses[anchor];
            sum_a[i] += estimate;
            sq_a[i] += estimate * estimate;
        }
        // Family B: anchor from the law, a single uniform target.
        const std::size_t a = tree.sample(rng.uniform01());
        const std::size_t b = uniform_index(rng, K);
        for (std::size_t i = 0; i < K; ++i) {
            const double shifted = b == i ? static_cast<double>(K) * (losses[i] - losses[a]) : 0.0;
            const double estimate = shifted + losses[a];
            sum_b[i] += estimate;
            sq_b[i] += estimate * estimate;
        }
    }

    const double dn = static_cast<double>(rounds);
    double worst = 0.0;
    bool pass = true;
    for (int family = 0; family < 2; ++family) {
        const auto& sum = family == 0 ? sum_a : sum_b;
        const auto& sq = family == 0 ? sq_a : sq_b;
        for (std::size_t i = 0; i < K; ++i) {
            const double mean = sum[i] / dn;
            const double var = std::max(0.0, sq[i] / dn - mean * mean);
            const double se = std::sqrt(var / dn);
            const double gap = std::abs(mean - losses[i]);
            worst = std::max(worst, se > 0.0 ? gap / se : gap);
            if (gap > 4.0 * se + 1e-12) pass = false;
        }
    }
    return {pass, "worst |mean - true loss| / stderr = " + fmt(worst) +
                      " over both families (need <= 4)"};
}

struct TwoStepCounts {
    std::vector<double> law;
    std::vector<std::uint64_t> marginal;
    std::vector<std::vector<std::uint64_t>> joint;
    std::size_t draws = 0;
};

// Two-step pair sampler with a fixed non-uniform law: anchor from the
// law, target uniform, then two conditionally independent picks from
// the law restricted to {anchor, target}.
TwoStepCounts sample_two_step() {
    TwoStepCounts out;
    out.law = {0.4, 0.25, 0.2, 0.1, 0.05};
    const std::size_t K = out.law.size();
    out.draws = 100000;
    out.marginal.assign(K, 0);
    out.joint.assign(K, std::vector<std::uint64_t>(K, 0));
    SplitMix64 rng(derive_seed(1, "acceptance-two-step", 0));
    for (std::size_t r = 0; r < out.draws; ++r) {
        WeightTree tree(out.law); // law is fixed; rebuild is cheap at K = 5
        const std::size_t a = tree.sample(rng.uniform01());
        const std::size_t b = uniform_index(rng, K);
        const double ui = rng.uniform01();
        const double uj = rng.uniform01();
        std::size_t i = a, j = a;
        if (a != b) {
            const double qa = out.law[a] / (out.law[a] + out.law[b]);
            i = ui < qa ? a : b;
            j = uj < qa ? a : b;
        }
        ++out.marginal[i];
        ++out.joint[i][j];
    }
    return out;
}

// 7. The first pick's marginal law equals the target law (chi-square
//    below the 99.9% critical value for dof = 4).
Outcome criterion_7() {
    const TwoStepCounts counts = sample_two_step();
    const auto [stat, dof] = chi_square_gof(counts.marginal, counts.law);
    const bool pass = dof == 4 && stat < 18.467;
    return {pass, "chi-square " + fmt(stat) + " with dof " + std::to_string(dof) +
                      " (99.9% critical value 18.467), 100000 draws"};
}

// 8. Joint lower bound: every pair satisfies
//      P(I=i, J=j) >= p_i p_j / K - 3 stderr.
Outcome criterion_8() {
    const TwoStepCounts counts = sample_two_step();
    const std::size_t K = counts.law.size();
    const double dn = static_cast<double>(counts.draws);
    double worst_margin = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) {
            const double phat = static_cast<double>(counts.joint[i][j]) / dn;
            const double se = std::sqrt(std::max(phat * (1.0 - phat), 1.0 / dn) / dn);
            const double bound = counts.law[i] * counts.law[j] / static_cast<double>(K) - 3.0 * se;
            worst_margin = std::min(worst_margin, phat - bound);
            if (phat < bound) pass = false;
        }
    return {pass, "worst margin over the 25 pairs = " + fmt(worst_margin) + " (need >= 0)"};
}

// 9. Sum tree vs the O(K) inverse-CDF oracle after 10^4 random updates.
Outcome criterion_9() {
    const std::size_t K = 1000, updates = 10000, grid = 10000;
    std::vector<double> weights(K, 1.0);
    WeightTree tree(weights);
    SplitMix64 rng(derive_seed(1, "acceptance-tree", 0));
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
    std::size_t mismatches = 0;
    for (std::size_t g = 0; g < grid; ++g) {
        const double u = static_cast<double>(g) / static_cast<double>(grid);
        const double z = running * u;
        std::size_t naive =
            static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), z) -
                                     cumulative.begin());
        if (naive >= K) naive = K - 1;
        while (weights[naive] == 0.0 && naive > 0) --naive;
        if (tree.sample(u) != naive) ++mismatches;
    }
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double reference = weights[i] / running;
        worst_rel = std::max(worst_rel, std::abs(tree.prob(i) - reference) /
                                            std::max(reference, 1e-300));
    }
    const bool pass = mismatches == 0 && worst_rel < 1e-9;
    return {pass, std::to_string(mismatches) + " index mismatches over " + std::to_string(grid) +
                      " grid points, worst probability relative error " + fmt(worst_rel)};
}

// 10. Dense raw updates and sparse shifted updates induce the same
//     sampling law, so identical uniform streams yield identical
//     (I, J, U) sequences.
Outcome criterion_10() {
    GameConfig config;
    config.K = 8;
    config.p = 2;
    config.m = 4;
    config.T = 1000;
    config.lambda = default_lambda(Algo::algo3, 8, 4, 0.5, 1.0);
    MidpointEwLearner sparse(config);
    MidpointEwLearner dense(config, MidpointEwLearner::Options{true, true});
    const std::uint64_t seed = derive_seed(1, "acceptance-shift", 0);
    SplitMix64 rng_sparse(seed);
    SplitMix64 rng_dense(seed);
    SplitMix64 loss_rng(derive_seed(1, "acceptance-shift-losses", 0));
    std::size_t mismatches = 0;
    for (std::size_t t = 1; t <= config.T; ++t) {
        const auto a = sparse.act(t, rng_sparse);
        const auto b = dense.act(t, rng_dense);
        if (a.I != b.I || a.J != b.J || a.U != b.U) ++mismatches;
        std::vector<double> losses(config.K);
        for (double& l : losses) l = loss_rng.uniform01();
        std::vector<std::pair<std::size_t, double>> seen_a, seen_b;
        for (std::size_t i : a.action.C) seen_a.emplace_back(i, losses[i]);
        for (std::size_t i : b.action.C) seen_b.emplace_back(i, losses[i]);
        sparse.observe(t, seen_a);
        dense.observe(t, seen_b);
    }
    return {mismatches == 0, std::to_string(mismatches) +
                                 " divergent rounds out of 1000 (K = 8, shared uniform stream)"};
}

// 11. Midpoint-curvature membership of the squared loss at the printed
//     constant for (eta, B) = (0.5, 1): violations over the corner grid
//     plus 10^4 random triples, tolerance 1e-12.
Outcome criterion_11() {
    SquaredLoss loss;
    SplitMix64 rng(derive_seed(1, "acceptance-curvature", 0));
    const auto samples = make_sample_triples(loss, 10000, rng);
    const double c = ec_constant_exp_concave(0.5, 1.0);
    const std::size_t violations = check_ec_membership(loss, c, samples, 1e-12);
    const std::size_t at_eight = check_ec_membership(loss, 8.0, samples, 1e-12);
    return {violations == 0, std::to_string(violations) + " violations at c = " + fmt(c) +
                                 " (for reference: " + std::to_string(at_eight) +
                                 " violations at c = 8)"};
}

// 12. Two CLI runs with one configuration produce byte-identical CSV
//     and JSON outputs.
Outcome criterion_12() {
    const std::string cli = FRUGAL_CLI_PATH;
    auto invoke = [&](const std::string& prefix) {
        const std::string command = "\"" + cli +
                                    "\" run --K 6 --p 2 --m 3 --algo algo3 --T 2048 --trials 5 "
                                    "--seed 7 --adversary bernoulli --out " +
                                    prefix + " > /dev/null";
        return std::system(command.c_str());
    };
    if (invoke("acceptance_repro_a") != 0) return {false, "first CLI invocation failed"};
    if (invoke("acceptance_repro_b") != 0) return {false, "second CLI invocation failed"};
    Outcome out;
    try {
        const std::string csv_a = read_file("acceptance_repro_a.csv");
        const std::string csv_b = read_file("acceptance_repro_b.csv");
        const std::string json_a = read_file("acceptance_repro_a.json");
        const std::string json_b = read_file("acceptance_repro_b.json");
        out.pass = csv_a == csv_b && json_a == json_b && !csv_a.empty() && !json_a.empty();
        out.detail = "csv " + std::to_string(csv_a.size()) + " bytes, json " +
                     std::to_string(json_a.size()) + " bytes, " +
                     (out.pass ? "byte-identical across runs" : "outputs differ");
    } catch (const std::exception& err) {
        out = {false, std::string("cannot read CLI outputs: ") + err.what()};
    }
    for (const char* name : {"acceptance_repro_a.csv", "acceptance_repro_a.json",
                             "acceptance_repro_b.csv", "acceptance_repro_b.json"})
        std::remove(name);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else if (arg == "--help" || arg == "-h") {
            std::printf("usage: acceptance [--criterion N]\n");
            return 0;
        }
    }

    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry table[] = {
        {1, "expectation-bound ceiling (two-sample midpoint, no variance term)", criterion_1},
        {2, "constant-regret plateau (two-sample midpoint with variance term)", criterion_2},
        {3, "rate separation against the single-arm baseline", criterion_3},
        {4, "upper-tail control on the correlated hard instance", criterion_4},
        {5, "coupled-pair plateau under the inclusion condition", criterion_5},
        {6, "loss-estimate unbiasedness for both estimator families", criterion_6},
        {7, "two-step sampler marginal law", criterion_7},
        {8, "two-step sampler joint lower bound", criterion_8},
        {9, "sum-tree agreement with the naive inverse-CDF oracle", criterion_9},
        {10, "raw and shifted updates sample identical index sequences", criterion_10},
        {11, "midpoint-curvature membership at the printed constant", criterion_11},
        {12, "repeated CLI runs are byte-identical", criterion_12},
    };

    int failures = 0;
    bool matched = false;
    for (const Entry& entry : table) {
        if (selected != 0 && entry.id != selected) continue;
        matched = true;
        Outcome outcome;
        try {
            outcome = entry.fn();
        } catch (const std::exception& err) {
            outcome = {false, std::string("exception: ") + err.what()};
        }
        std::printf("[%s] criterion %d: %s -- %s\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                    entry.name, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (!matched) {
        std::fprintf(stderr, "unknown criterion %d (valid: 1..12)\n", selected);
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
