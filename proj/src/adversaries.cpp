#include "frugal/adversaries.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "frugal/rng.hpp"

namespace frugal {

AdversaryKind parse_adversary(const std::string& name) {
    if (name == "lower_bound") return AdversaryKind::lower_bound;
    if (name == "bernoulli") return AdversaryKind::iid_bernoulli;
    if (name == "fixed") return AdversaryKind::fixed;
    throw std::invalid_argument("unknown adversary: " + name);
}

std::string adversary_name(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::lower_bound: return "lower_bound";
        case AdversaryKind::iid_bernoulli: return "bernoulli";
        case AdversaryKind::fixed: return "fixed";
    }
    throw std::invalid_argument("unknown adversary kind");
}

std::vector<double> lower_bound_forecasts(std::size_t K, double eps, std::size_t i_star,
                                          double u) {
    if (!(eps > 0.0 && eps < 0.25))
        throw std::invalid_argument("lower_bound_forecasts: eps must lie in (0, 1/4)");
    if (i_star >= K) throw std::invalid_argument("lower_bound_forecasts: i_star out of range");
    std::vector<double> forecasts(K, u <= 0.5 ? 1.0 : 0.0);
    forecasts[i_star] = u <= 0.5 - eps ? 1.0 : 0.0;
    return forecasts;
}

std::vector<double> iid_bernoulli_forecasts(const std::vector<double>& means,
                                            const std::vector<double>& u_vector) {
    if (means.size() != u_vector.size())
        throw std::invalid_argument("iid_bernoulli_forecasts: dimension mismatch");
    std::vector<double> forecasts(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (!(means[i] >= 0.0 && means[i] <= 1.0))
            throw std::invalid_argument("iid_bernoulli_forecasts: means must lie in [0,1]");
        forecasts[i] = u_vector[i] < means[i] ? 1.0 : 0.0;
    }
    return forecasts;
}

double default_eps(std::size_t K, std::size_t m, std::size_t T) {
    if (m == 0 || T == 0) return 0.1;
    const double candidate =
        static_cast<double>(K) / (900.0 * static_cast<double>(m) * static_cast<double>(T));
    return std::min(0.1, candidate);
}

LowerBoundAdversary::LowerBoundAdversary(std::size_t K, double eps, std::size_t i_star,
                                         std::uint64_t seed)
    : K_(K), eps_(eps), i_star_(i_star), seed_(seed) {
    if (K == 0) throw std::invalid_argument("LowerBoundAdversary: K must be positive");
    if (!(eps > 0.0 && eps < 0.25))
        throw std::invalid_argument("LowerBoundAdversary: eps must lie in (0, 1/4)");
    if (i_star >= K) throw std::invalid_argument("LowerBoundAdversary: i_star out of range");
}

void LowerBoundAdversary::round(std::size_t t, std::vector<double>& forecasts, double& outcome) {
    SplitMix64 stream(derive_seed(seed_, "adv", t));
    const double u = stream.uniform01();
    forecasts.assign(K_, u <= 0.5 ? 1.0 : 0.0);
    forecasts[i_star_] = u <= 0.5 - eps_ ? 1.0 : 0.0;
    outcome = 0.0;
}

BernoulliAdversary::BernoulliAdversary(std::vector<double> means, std::uint64_t seed)
    : means_(std::move(means)), seed_(seed) {
    if (means_.empty()) throw std::invalid_argument("BernoulliAdversary: need at least one mean");
    for (double mu : means_)
        if (!(mu >= 0.0 && mu <= 1.0))
            throw std::invalid_argument("BernoulliAdversary: means must lie in [0,1]");
}

void BernoulliAdversary::round(std::size_t t, std::vector<double>& forecasts, double& outcome) {
    SplitMix64 stream(derive_seed(seed_, "adv", t));
    forecasts.resize(means_.size());
    for (std::size_t i = 0; i < means_.size(); ++i)
        forecasts[i] = stream.uniform01() < means_[i] ? 1.0 : 0.0;
    outcome = 0.0;
}

FixedAdversary::FixedAdversary(std::vector<std::vector<double>> forecasts,
                               std::vector<double> outcomes)
    : forecasts_(std::move(forecasts)), outcomes_(std::move(outcomes)) {
    if (forecasts_.size() != outcomes_.size())
        throw std::invalid_argument("FixedAdversary: forecast/outcome length mismatch");
}

std::size_t FixedAdversary::num_experts() const {
    return forecasts_.empty() ? 0 : forecasts_.front().size();
}

void FixedAdversary::round(std::size_t t, std::vector<double>& forecasts, double& outcome) {
    if (t == 0 || t > outcomes_.size())
        throw std::out_of_range("FixedAdversary: round " + std::to_string(t) +
                                " beyond recorded sequence of length " +
                                std::to_string(outcomes_.size()));
    forecasts = forecasts_[t - 1];
    outcome = outcomes_[t - 1];
}

FixedAdversary load_fixed_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_fixed_sequence: cannot open " + path);
    std::vector<std::vector<double>> forecasts;
    std::vector<double> outcomes;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        std::vector<double> values;
        std::string token;
        while (row >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size())
                throw std::runtime_error("load_fixed_sequence: " + path + ":" +
                                         std::to_string(line_no) + ": non-numeric field '" +
                                         token + "'");
            values.push_back(v);
        }
        if (values.size() < 2)
            throw std::runtime_error("load_fixed_sequence: " + path + ":" +
                                     std::to_string(line_no) +
                                     ": need K forecast columns plus an outcome");
        if (width == 0) width = values.size();
        if (values.size() != width)
            throw std::runtime_error("load_fixed_sequence: " + path + ":" +
                                     std::to_string(line_no) + ": expected " +
                                     std::to_string(width) + " columns, got " +
                                     std::to_string(values.size()));
        outcomes.push_back(values.back());
        values.pop_back();
        forecasts.push_back(std::move(values));
    }
    return FixedAdversary(std::move(forecasts), std::move(outcomes));
}

std::unique_ptr<Adversary> make_adversary(const AdversaryConfig& config) {
    switch (config.kind) {
        case AdversaryKind::lower_bound:
            return std::make_unique<LowerBoundAdversary>(config.K, config.eps, config.i_star,
                                                         config.seed);
        case AdversaryKind::iid_bernoulli: {
            std::vector<double> means = config.means;
            if (means.empty()) throw std::invalid_argument("make_adversary: bernoulli needs means");
            if (means.size() != config.K)
                throw std::invalid_argument("make_adversary: means length must equal K");
            return std::make_unique<BernoulliAdversary>(std::move(means), config.seed);
        }
        case AdversaryKind::fixed: {
            auto adversary = std::make_unique<FixedAdversary>(load_fixed_sequence(config.file));
            if (adversary->num_rounds() > 0 && adversary->num_experts() != config.K)
                throw std::invalid_argument("make_adversary: fixed file width does not match K");
            return adversary;
        }
    }
    throw std::invalid_argument("make_adversary: unknown adversary kind");
}

} // namespace frugal
