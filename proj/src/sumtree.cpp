#include "frugal/sumtree.hpp"

#include <cmath>
#include <stdexcept>

namespace frugal {

WeightTree::WeightTree(const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("WeightTree: need at least one weight");
    leaf_count_ = weights.size();
    capacity_ = 1;
    while (capacity_ < leaf_count_) capacity_ *= 2;
    nodes_.assign(2 * capacity_, 0.0);
    bool any_positive = false;
    for (std::size_t i = 0; i < leaf_count_; ++i) {
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("WeightTree: weights must be finite and nonnegative");
        if (w > 0.0) any_positive = true;
        nodes_[capacity_ + i] = w;
    }
    if (!any_positive) throw std::invalid_argument("WeightTree: all weights are zero");
    rebuild(false);
}

double WeightTree::weight(std::size_t i) const {
    if (i >= leaf_count_) throw std::out_of_range("WeightTree: leaf index out of range");
    return nodes_[capacity_ + i];
}

void WeightTree::multiply_leaf(std::size_t i, double factor) {
    if (i >= leaf_count_) throw std::out_of_range("WeightTree: leaf index out of range");
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw std::invalid_argument("WeightTree: factor must be positive and finite");
    std::size_t u = capacity_ + i;
    nodes_[u] *= factor;
    ++visits_;
    while (u > 1) {
        u /= 2;
        nodes_[u] = nodes_[2 * u] + nodes_[2 * u + 1];
        ++visits_;
    }
    if (++updates_since_rebuild_ >= kRebuildEvery || nodes_[1] < kRootLow || nodes_[1] > kRootHigh)
        rebuild(true);
}

std::size_t WeightTree::sample(double u) const {
    if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("WeightTree: u must lie in [0,1)");
    double z = nodes_[1] * u;
    std::size_t v = 1;
    while (v < capacity_) {
        ++visits_;
        const std::size_t left = 2 * v;
        // Forced moves keep the descent off zero-mass subtrees, so a
        // zero leaf can never be returned even at float boundaries.
        if (nodes_[left + 1] == 0.0) {
            v = left;
        } else if (nodes_[left] == 0.0 || z >= nodes_[left]) {
            z -= nodes_[left];
            v = left + 1;
        } else {
            v = left;
        }
    }
    ++visits_;
    return v - capacity_;
}

double WeightTree::prob(std::size_t i) const {
    return weight(i) / nodes_[1];
}

void WeightTree::rebuild(bool rescale) {
    if (rescale) {
        const double total = nodes_[1];
        if (total > 0.0 && std::isfinite(total))
            for (std::size_t i = 0; i < leaf_count_; ++i) nodes_[capacity_ + i] /= total;
    }
    for (std::size_t v = capacity_ - 1; v >= 1; --v) {
        nodes_[v] = nodes_[2 * v] + nodes_[2 * v + 1];
        if (v == 1) break;
    }
    updates_since_rebuild_ = 0;
}

double WeightTree::max_relative_drift() const {
    double worst = 0.0;
    for (std::size_t v = 1; v < capacity_; ++v) {
        const double sum = nodes_[2 * v] + nodes_[2 * v + 1];
        const double denom = std::max(std::abs(nodes_[v]), std::abs(sum));
        if (denom > 0.0) worst = std::max(worst, std::abs(nodes_[v] - sum) / denom);
    }
    return worst;
}

} // namespace frugal
