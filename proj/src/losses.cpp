#include "frugal/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace frugal {

double SquaredLoss::eval(double x, double y) const {
    return eval_squared_loss(x, y);
}

LossSpec SquaredLoss::spec() {
    LossSpec s;
    s.B = 1.0;
    s.eta = 0.5; // 1/(2B): the largest eta under which exp(-eta*loss) stays concave
    s.lambda_bar = lambda_bar(s.eta, s.B);
    s.ec_constant = ec_constant_exp_concave(s.eta, s.B);
    return s;
}

double eval_squared_loss(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("eval_squared_loss: x outside [0,1]");
    if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("eval_squared_loss: y outside [0,1]");
    const double d = x - y;
    return d * d;
}

double lambda_bar(double eta, double B) {
    if (!(eta > 0.0)) throw std::invalid_argument("lambda_bar: eta must be positive");
    if (!(B > 0.0)) throw std::invalid_argument("lambda_bar: B must be positive");
    const double a = 4.0 * std::log1p(eta * eta * B * B / 2.0) / (eta * B * B);
    return std::min(a, 1.0 / B);
}

double ec_constant_exp_concave(double eta, double B) {
    if (!(eta > 0.0)) throw std::invalid_argument("ec_constant: eta must be positive");
    if (!(B > 0.0)) throw std::invalid_argument("ec_constant: B must be positive");
    return eta * B * B / (4.0 * std::log1p(eta * eta * B * B / 2.0));
}

double ec_constant_strongly_convex(double L, double rho) {
    if (!(L > 0.0)) throw std::invalid_argument("ec_constant: L must be positive");
    if (!(rho > 0.0)) throw std::invalid_argument("ec_constant: rho must be positive");
    return 4.0 * L * L / rho;
}

std::size_t check_ec_membership(const LossFunction& loss, double c,
                                const std::vector<SampleTriple>& samples,
                                double tol) {
    if (!(c > 0.0)) throw std::invalid_argument("check_ec_membership: c must be positive");
    if (tol < 0.0) throw std::invalid_argument("check_ec_membership: tol must be nonnegative");
    std::size_t violations = 0;
    for (const auto& s : samples) {
        const double fx = loss.eval(s.x, s.y);
        const double fxp = loss.eval(s.x_prime, s.y);
        const double fm = loss.eval(0.5 * (s.x + s.x_prime), s.y);
        const double gap = fx - fxp;
        const double rhs = 0.5 * fx + 0.5 * fxp - gap * gap / (2.0 * c);
        if (fm > rhs + tol) ++violations;
    }
    return violations;
}

std::size_t check_exp_concavity(const LossFunction& loss, double eta,
                                const std::vector<SampleTriple>& samples,
                                double tol) {
    if (!(eta > 0.0)) throw std::invalid_argument("check_exp_concavity: eta must be positive");
    std::size_t violations = 0;
    for (const auto& s : samples) {
        const double gx = std::exp(-eta * loss.eval(s.x, s.y));
        const double gxp = std::exp(-eta * loss.eval(s.x_prime, s.y));
        const double gm = std::exp(-eta * loss.eval(0.5 * (s.x + s.x_prime), s.y));
        if (gm < 0.5 * gx + 0.5 * gxp - tol) ++violations;
    }
    return violations;
}

std::vector<SampleTriple> make_sample_triples(const LossFunction& loss,
                                              std::size_t n_random,
                                              RandomSource& rng) {
    const auto [lo, hi] = loss.domain();
    const double mid = 0.5 * (lo + hi);
    const double grid[3] = {lo, mid, hi};
    std::vector<SampleTriple> out;
    out.reserve(n_random + 27);
    for (double x : grid)
        for (double xp : grid)
            for (double y : grid) out.push_back({x, xp, y});
    const double w = hi - lo;
    for (std::size_t i = 0; i < n_random; ++i) {
        SampleTriple s;
        s.x = lo + w * rng.uniform01();
        s.x_prime = lo + w * rng.uniform01();
        s.y = lo + w * rng.uniform01();
        out.push_back(s);
    }
    return out;
}

} // namespace frugal
