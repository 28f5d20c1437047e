// frugal: command-line simulator for online prediction with limited
// expert advice. Subcommands:
//   run      one experiment (seeded multi-trial game), CSV + JSON out
//   sweep    grid of experiments over --T-list and/or --m-list
//   validate statistical self-checks; exits nonzero on any failure
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frugal/harness.hpp"
#include "frugal/losses.hpp"

namespace {

struct CliOptions {
    std::size_t K = 10;
    std::size_t p = 2;
    std::size_t m = 4;
    bool ic = false;
    std::string algo = "algo3";
    std::size_t T = 4096;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    double lambda = 0.0; // 0 = derive a default for the algorithm
    std::string adversary = "bernoulli";
    double eps = 0.0; // 0 = derive min{0.1, K/(900 m T)}
    std::size_t istar = 1;
    std::vector<double> means;
    std::string file;
    double delta = 0.05;
    std::string out = "results";
    std::vector<std::size_t> checkpoints;
    std::vector<std::size_t> T_list;
    std::vector<std::size_t> m_list;
    bool p_set = false, m_set = false, lambda_set = false, eps_set = false, means_set = false;
};

void add_common_options(CLI::App& cmd, CliOptions& opt) {
    cmd.add_option("--K", opt.K, "Number of experts")->check(CLI::PositiveNumber);
    cmd.add_option("--p", opt.p, "Play budget |S| <= p");
    cmd.add_option("--m", opt.m, "Observation budget |C| <= m");
    cmd.add_flag("--ic", opt.ic, "Inclusion condition: played set must be observed");
    cmd.add_option("--algo", opt.algo, "algo2|algo3|algo4|ewa|exp3|uniform")
        ->check(CLI::IsMember({"algo2", "algo3", "algo4", "ewa", "exp3", "uniform"}));
    cmd.add_option("--T", opt.T, "Horizon (rounds per trial)");
    cmd.add_option("--trials", opt.trials, "Independent trials")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", opt.seed, "Master seed");
    cmd.add_option("--lambda", opt.lambda,
                   "Learning rate; defaults to the algorithm's derived rate");
    cmd.add_option("--adversary", opt.adversary, "lower_bound|bernoulli|fixed")
        ->check(CLI::IsMember({"lower_bound", "bernoulli", "fixed"}));
    cmd.add_option("--eps", opt.eps, "lower_bound gap; defaults to min{0.1, K/(900 m T)}");
    cmd.add_option("--istar", opt.istar, "lower_bound distinguished expert (1-based)");
    cmd.add_option("--means", opt.means,
                   "bernoulli expert means; defaults to 0.4 then 0.5s")
        ->delimiter(',');
    cmd.add_option("--file", opt.file, "fixed adversary sequence file");
    cmd.add_option("--delta", opt.delta, "Quantile level: report the (1-delta) quantile");
    cmd.add_option("--out", opt.out, "Output prefix for <out>.csv and <out>.json");
    cmd.add_option("--checkpoints", opt.checkpoints,
                   "Regret checkpoints; defaults to powers of two from 64 to T")
        ->delimiter(',');
}

void capture_set_flags(CLI::App& cmd, CliOptions& opt) {
    opt.p_set = cmd.count("--p") > 0;
    opt.m_set = cmd.count("--m") > 0;
    opt.lambda_set = cmd.count("--lambda") > 0;
    opt.eps_set = cmd.count("--eps") > 0;
    opt.means_set = cmd.count("--means") > 0;
}

frugal::ExperimentConfig resolve(const CliOptions& opt, std::size_t T, std::size_t m,
                                 const std::string& out_prefix) {
    frugal::ExperimentConfig config;
    config.algo = frugal::parse_algo(opt.algo);

    config.game.K = opt.K;
    config.game.p = opt.p;
    config.game.m = m;
    config.game.IC = opt.ic;
    config.game.T = T;

    // The full-information and single-arm baselines fix their own
    // budgets; fill them in unless the user insisted.
    if (config.algo == frugal::Algo::ewa) {
        if (!opt.p_set) config.game.p = opt.K;
        if (!opt.m_set) config.game.m = opt.K;
    } else if (config.algo == frugal::Algo::exp3) {
        if (!opt.p_set) config.game.p = 1;
        if (!opt.m_set) config.game.m = 1;
    }

    if (opt.lambda_set) {
        config.game.lambda = opt.lambda;
    } else {
        const frugal::LossSpec spec = frugal::SquaredLoss::spec();
        switch (config.algo) {
            case frugal::Algo::algo2:
            case frugal::Algo::algo3:
            case frugal::Algo::algo4:
                config.game.lambda = frugal::default_lambda(config.algo, config.game.K,
                                                            config.game.m, spec.eta, spec.B);
                break;
            case frugal::Algo::ewa:
                // eta achieves constant regret for an exp-concave loss.
                config.game.lambda = spec.eta;
                break;
            case frugal::Algo::exp3: {
                // Minimax rate for importance-weighted losses.
                const double k = static_cast<double>(config.game.K);
                const double horizon = static_cast<double>(std::max<std::size_t>(T, 1));
                const double rate = std::sqrt(2.0 * std::log(k) / (k * horizon));
                config.game.lambda = rate > 0.0 ? rate : 1.0;
                break;
            }
            case frugal::Algo::uniform:
                config.game.lambda = 1.0; // unused
                break;
        }
    }

    config.adversary.kind = frugal::parse_adversary(opt.adversary);
    config.adversary.K = opt.K;
    switch (config.adversary.kind) {
        case frugal::AdversaryKind::lower_bound:
            config.adversary.eps =
                opt.eps_set ? opt.eps : frugal::default_eps(opt.K, config.game.m, T);
            if (opt.istar < 1 || opt.istar > opt.K)
                throw std::invalid_argument("--istar must lie in 1..K");
            config.adversary.i_star = opt.istar - 1;
            break;
        case frugal::AdversaryKind::iid_bernoulli:
            if (opt.means_set) {
                config.adversary.means = opt.means;
            } else {
                config.adversary.means.assign(opt.K, 0.5);
                config.adversary.means[0] = 0.4;
            }
            break;
        case frugal::AdversaryKind::fixed:
            if (opt.file.empty()) throw std::invalid_argument("--file is required for the fixed adversary");
            config.adversary.file = opt.file;
            break;
    }

    config.trials = opt.trials;
    config.master_seed = opt.seed;
    config.delta = opt.delta;
    config.checkpoints = opt.checkpoints;
    config.out_prefix = out_prefix;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online prediction with limited expert advice: simulator and validator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a config file (CLI flags override)");

    CliOptions opt;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment");
    add_common_options(*run_cmd, opt);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a grid of experiments");
    add_common_options(*sweep_cmd, opt);
    sweep_cmd->add_option("--T-list", opt.T_list, "Horizons to sweep")->delimiter(',');
    sweep_cmd->add_option("--m-list", opt.m_list, "Observation budgets to sweep")->delimiter(',');

    CLI::App* validate_cmd = app.add_subcommand("validate", "Run statistical self-checks");
    std::uint64_t validate_seed = 1;
    validate_cmd->add_option("--seed", validate_seed, "Seed for the checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            capture_set_flags(*run_cmd, opt);
            const auto config = resolve(opt, opt.T, opt.m, opt.out);
            const auto result = frugal::run_experiment(config);
            std::cout << frugal::experiment_json(config, result);
            return 0;
        }
        if (sweep_cmd->parsed()) {
            capture_set_flags(*sweep_cmd, opt);
            std::vector<std::size_t> horizons = opt.T_list.empty()
                                                    ? std::vector<std::size_t>{opt.T}
                                                    : opt.T_list;
            std::vector<std::size_t> budgets =
                opt.m_list.empty() ? std::vector<std::size_t>{opt.m} : opt.m_list;
            for (std::size_t T : horizons)
                for (std::size_t m : budgets) {
                    const std::string prefix =
                        opt.out + "_T" + std::to_string(T) + "_m" + std::to_string(m);
                    const auto config = resolve(opt, T, m, prefix);
                    const auto result = frugal::run_experiment(config);
                    // One compact JSON block per grid cell.
                    auto block = frugal::experiment_json(config, result);
                    std::cout << block;
                }
            return 0;
        }
        // validate
        const std::size_t failures = frugal::run_validation_suite(validate_seed, std::cout);
        if (failures > 0) {
            std::cout << failures << " check(s) failed\n";
            return 1;
        }
        std::cout << "all checks passed\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
