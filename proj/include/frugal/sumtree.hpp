#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace frugal {

// Balanced binary tree of partial sums over K nonnegative leaf weights.
// Supports O(log K) inverse-CDF sampling and O(log K) multiplicative
// leaf updates; drift from repeated floating-point updates is bounded
// by periodic exact rebuilds.
//
// Layout: heap order in a flat array, root at index 1, children of u at
// 2u and 2u+1, leaves at [capacity, capacity + K). K is padded to the
// next power of two with zero-weight leaves, which the descent rule can
// never select.
class WeightTree {
public:
    // Builds the tree in O(K). Throws std::invalid_argument when
    // weights is empty, contains a negative or non-finite entry, or
    // sums to zero.
    explicit WeightTree(const std::vector<double>& weights);

    std::size_t leaf_count() const { return leaf_count_; }
    std::size_t capacity() const { return capacity_; }
    double total() const { return nodes_[1]; }
    double weight(std::size_t i) const;

    // Leaf weight i scaled by factor, ancestors resummed; O(log K).
    // May trigger an automatic rescaling rebuild (see below). Throws
    // std::out_of_range on a bad index, std::invalid_argument on a
    // nonpositive or non-finite factor.
    void multiply_leaf(std::size_t i, double factor);

    // Inverse-CDF descent for u in [0,1): Z = total*u, then from the
    // root go left when Z < S_left, else subtract S_left and go right.
    // Equivalent to picking the leaf whose cumulative interval
    // [cum_{i-1}, cum_i) contains Z, left-to-right; zero-weight leaves
    // own empty intervals and are never returned (a forced move guards
    // the float edge where Z lands on an empty right subtree).
    std::size_t sample(double u) const;

    // weight(i) / total().
    double prob(std::size_t i) const;

    // Recomputes every internal node exactly from the leaves; when
    // rescale is set, first divides all leaves by the current root sum
    // so the new total is 1. Probabilities are unchanged either way.
    void rebuild(bool rescale = false);

    // Automatic policy: multiply_leaf rebuilds (with rescale) once the
    // root sum leaves [2^-64, 2^64] or after 2^16 updates, whichever
    // comes first.
    static constexpr double kRootLow = 0x1.0p-64;
    static constexpr double kRootHigh = 0x1.0p+64;
    static constexpr std::uint32_t kRebuildEvery = 1u << 16;

    // Nodes touched by sample/multiply_leaf since construction; lets
    // tests pin the O(log K) cost contract.
    std::uint64_t node_visits() const { return visits_; }

    // Largest relative parent-vs-children mismatch over internal
    // nodes; exact zero right after a rebuild.
    double max_relative_drift() const;

private:
    std::size_t leaf_count_ = 0;
    std::size_t capacity_ = 1;
    std::vector<double> nodes_;
    std::uint32_t updates_since_rebuild_ = 0;
    mutable std::uint64_t visits_ = 0;
};

} // namespace frugal
