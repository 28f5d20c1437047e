#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "frugal/rng.hpp"
#include "frugal/sumtree.hpp"

using namespace frugal;

namespace {

// O(K) reference: first leaf whose cumulative sum exceeds z = total*u,
// clamped back onto positive leaves at the top edge.
std::size_t naive_sample(const std::vector<double>& weights, double u) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double z = total * u;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (weights[i] > 0.0) last_positive = i;
        if (z < cum && weights[i] > 0.0) return i;
    }
    return last_positive;
}

} // namespace

TEST_CASE("build basics") {
    WeightTree uniform4(std::vector<double>{1, 1, 1, 1});
    CHECK(uniform4.total() == doctest::Approx(4.0));
    CHECK(uniform4.capacity() == 4);

    WeightTree padded(std::vector<double>{2, 1, 1});
    CHECK(padded.capacity() == 4);
    CHECK(padded.total() == doctest::Approx(4.0));
    CHECK(padded.prob(0) == doctest::Approx(0.5));

    WeightTree singleton(std::vector<double>{5});
    CHECK(singleton.total() == doctest::Approx(5.0));
    CHECK(singleton.sample(0.0) == 0);
    CHECK(singleton.sample(0.99) == 0);

    CHECK_THROWS_AS(WeightTree(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(WeightTree(std::vector<double>{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(WeightTree(std::vector<double>{1, -1}), std::invalid_argument);
}

TEST_CASE("multiply_leaf updates sums and probabilities") {
    WeightTree tree(std::vector<double>{1, 1, 1, 1});
    tree.multiply_leaf(0, 3.0);
    CHECK(tree.total() == doctest::Approx(6.0));
    CHECK(tree.prob(0) == doctest::Approx(0.5));

    const double before = tree.total();
    tree.multiply_leaf(2, 1.0);
    CHECK(tree.total() == doctest::Approx(before));

    WeightTree pair(std::vector<double>{3, 1});
    CHECK(pair.prob(0) == doctest::Approx(0.75));

    CHECK_THROWS_AS(tree.multiply_leaf(4, 2.0), std::out_of_range);
    CHECK_THROWS_AS(tree.multiply_leaf(0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tree.multiply_leaf(0, -1.0), std::invalid_argument);
}

TEST_CASE("sample descent hand traces") {
    WeightTree uniform4(std::vector<double>{1, 1, 1, 1});
    CHECK(uniform4.sample(0.6) == 2); // cumulative quartiles: 0.6 lands in the third

    WeightTree pair(std::vector<double>{3, 1});
    CHECK(pair.sample(0.5) == 0); // z = 2 < 3
    CHECK(pair.sample(0.8) == 1); // z = 3.2 >= 3

    CHECK_THROWS_AS(uniform4.sample(1.0), std::invalid_argument);
    CHECK_THROWS_AS(uniform4.sample(-0.1), std::invalid_argument);
}

TEST_CASE("zero-weight leaves are never sampled") {
    WeightTree tree(std::vector<double>{1, 0, 2, 0, 0.5});
    SplitMix64 rng(3u);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t s = tree.sample(rng.uniform01());
        CHECK(s != 1);
        CHECK(s != 3);
        CHECK(s < 5);
    }
    // Also at grid points, including u values landing exactly on
    // cumulative boundaries.
    for (int g = 0; g < 1000; ++g) {
        const std::size_t s = tree.sample(g / 1000.0);
        CHECK(tree.weight(s) > 0.0);
    }
    WeightTree right_zero(std::vector<double>{1, 0});
    for (int g = 0; g < 100; ++g) CHECK(right_zero.sample(g / 100.0) == 0);
}

TEST_CASE("tree matches the naive inverse-CDF reference") {
    std::vector<double> weights = {0.3, 1.7, 0.0, 2.4, 0.1, 0.9, 3.3, 0.2, 1.1};
    WeightTree tree(weights);
    SplitMix64 rng(17u);
    for (int round = 0; round < 300; ++round) {
        const std::size_t i = uniform_index(rng, weights.size());
        if (weights[i] > 0.0) {
            const double factor = std::exp(2.0 * (rng.uniform01() - 0.5));
            tree.multiply_leaf(i, factor);
            weights[i] *= factor;
        }
        const double u = rng.uniform01();
        CHECK(tree.sample(u) == naive_sample(weights, u));
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double total = 0.0;
        for (double w : weights) total += w;
        CHECK(tree.prob(i) == doctest::Approx(weights[i] / total).epsilon(1e-9));
    }
}

TEST_CASE("rebuild restores exactness and rescale preserves probabilities") {
    WeightTree tree(std::vector<double>{1, 2, 3, 4, 5});
    SplitMix64 rng(5u);
    for (int i = 0; i < 20000; ++i)
        tree.multiply_leaf(uniform_index(rng, 5), std::exp(0.2 * (rng.uniform01() - 0.5)));
    tree.rebuild(false);
    CHECK(tree.max_relative_drift() == 0.0);

    std::vector<double> before(5);
    for (std::size_t i = 0; i < 5; ++i) before[i] = tree.prob(i);
    tree.rebuild(true);
    CHECK(tree.total() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(tree.prob(i) == doctest::Approx(before[i]).epsilon(1e-12));

    // Rebuilding a freshly rebuilt tree changes nothing.
    const double w0 = tree.weight(0), total = tree.total();
    tree.rebuild(false);
    CHECK(tree.weight(0) == w0);
    CHECK(tree.total() == total);
}

TEST_CASE("automatic rebuild bounds the root sum under geometric decay") {
    WeightTree tree(std::vector<double>{1, 1, 1, 1});
    // Persistent decay drives the root toward zero; the automatic
    // policy must rescale before it leaves [2^-64, 2^64].
    for (int i = 0; i < 40000; ++i)
        for (std::size_t leaf = 0; leaf < 4; ++leaf) tree.multiply_leaf(leaf, 0.99);
    CHECK(tree.total() >= WeightTree::kRootLow);
    CHECK(tree.total() <= WeightTree::kRootHigh);
    CHECK(tree.max_relative_drift() < 1e-9);
    // Probabilities survive all that rescaling: the decay was uniform.
    for (std::size_t i = 0; i < 4; ++i) CHECK(tree.prob(i) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("sample and multiply visit O(log K) nodes") {
    WeightTree tree(std::vector<double>(1000, 1.0));
    const std::uint64_t depth = 11; // capacity 1024, root to leaf inclusive
    std::uint64_t before = tree.node_visits();
    (void)tree.sample(0.37);
    CHECK(tree.node_visits() - before <= 2 * (depth + 1));
    before = tree.node_visits();
    tree.multiply_leaf(123, 1.5);
    CHECK(tree.node_visits() - before <= 2 * (depth + 1));
}
