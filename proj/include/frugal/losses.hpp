#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "frugal/rng.hpp"

namespace frugal {

// Descriptor of a loss function's analytic constants.
//   B           bound on the absolute loss value over the domain
//   eta         exp-concavity parameter of the loss
//   lambda_bar  cap on admissible learning rates,
//               min{ 4*ln(1 + eta^2 B^2 / 2) / (eta B^2), 1/B }
//   ec_constant constant c of the midpoint-curvature class E(c)
struct LossSpec {
    double B = 1.0;
    double eta = 0.5;
    double lambda_bar = 0.0;
    double ec_constant = 0.0;
};

// One evaluation point for the curvature checks: two predictions and
// an outcome.
struct SampleTriple {
    double x = 0.0;
    double x_prime = 0.0;
    double y = 0.0;
};

// Pointwise loss with a declared prediction/outcome domain interval.
class LossFunction {
public:
    virtual ~LossFunction() = default;
    virtual double eval(double x, double y) const = 0;
    // Closed interval on which predictions and outcomes live.
    virtual std::pair<double, double> domain() const { return {0.0, 1.0}; }
};

// (x - y)^2 on [0,1]; the instance used by every experiment here.
class SquaredLoss final : public LossFunction {
public:
    double eval(double x, double y) const override;
    static LossSpec spec();
};

// (x - y)^2 with domain validation; throws std::invalid_argument when
// x or y leaves [0,1].
double eval_squared_loss(double x, double y);

// min{ 4*ln(1 + eta^2 B^2 / 2) / (eta B^2), 1/B }. Throws
// std::invalid_argument on nonpositive inputs.
double lambda_bar(double eta, double B);

// E(c) constant for an eta-exp-concave, B-bounded loss:
//   eta * B^2 / (4 * ln(1 + eta^2 B^2 / 2)).
double ec_constant_exp_concave(double eta, double B);

// E(c) constant for an L-Lipschitz, rho-strongly-convex loss: 4 L^2 / rho.
double ec_constant_strongly_convex(double L, double rho);

// Counts triples violating the E(c) midpoint inequality
//   f((x+x')/2, y) <= f(x,y)/2 + f(x',y)/2 - (f(x,y) - f(x',y))^2 / (2c)
// by more than tol. Empty input yields 0.
std::size_t check_ec_membership(const LossFunction& loss, double c,
                                const std::vector<SampleTriple>& samples,
                                double tol = 1e-12);

// Counts triples violating midpoint concavity of x -> exp(-eta * f(x, y)),
//   exp(-eta f((x+x')/2, y)) >= exp(-eta f(x,y))/2 + exp(-eta f(x',y))/2,
// by more than tol. Zero violations on a rich sample set is the
// numerical certificate of eta-exp-concavity.
std::size_t check_exp_concavity(const LossFunction& loss, double eta,
                                const std::vector<SampleTriple>& samples,
                                double tol = 1e-12);

// n_random uniform triples over the loss domain plus every corner and
// midpoint combination of {lo, mid, hi}^3; curvature violations
// concentrate at the extremes, so the deterministic part matters.
std::vector<SampleTriple> make_sample_triples(const LossFunction& loss,
                                              std::size_t n_random,
                                              RandomSource& rng);

} // namespace frugal
