#include "gtsne/vptree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

namespace gtsne {

VpTree::VpTree(Matrix points, std::uint64_t seed) : points_(std::move(points)) {
    if (points_.rows() == 0) {
        throw std::invalid_argument("cannot build a vantage-point tree over zero points");
    }
    std::vector<std::size_t> items(points_.rows());
    for (std::size_t i = 0; i < items.size(); ++i) {
        items[i] = i;
    }
    nodes_.reserve(items.size());
    build(items, 0, items.size(), seed);
}

std::int32_t VpTree::build(std::vector<std::size_t>& items, std::size_t lower, std::size_t upper, std::uint64_t& state) {
    if (lower == upper) {
        return none;
    }

    // Local generator per call keeps the tree a pure function of the seed.
    std::mt19937_64 rng(state);
    state = rng();
    const std::size_t pick = lower + std::uniform_int_distribution<std::size_t>(0, upper - lower - 1)(rng);
    std::swap(items[lower], items[pick]);

    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{});
    nodes_[id].index = items[lower];

    if (upper - lower == 1) {
        return id;
    }

    const auto vantage = points_.row(items[lower]);
    std::vector<double> dist(points_.rows());
    for (std::size_t i = lower + 1; i < upper; ++i) {
        dist[items[i]] = squared_distance(vantage, points_.row(items[i]));
    }
    auto closer = [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };

    const std::size_t first = lower + 1;
    const std::size_t median = first + (upper - first - 1) / 2;
    std::nth_element(items.begin() + first, items.begin() + median, items.begin() + upper, closer);
    const double sq_radius = dist[items[median]];

    // Ties at the radius belong to the left subtree.
    auto split = std::partition(items.begin() + median + 1, items.begin() + upper,
                                [&](std::size_t i) { return dist[i] <= sq_radius; });
    const auto boundary = static_cast<std::size_t>(split - items.begin());

    nodes_[id].sq_radius = sq_radius;
    nodes_[id].radius = std::sqrt(sq_radius);
    const auto left = build(items, first, boundary, state);
    const auto right = build(items, boundary, upper, state);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

std::size_t VpTree::height() const {
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{root(), 1}};
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        if (node == none) {
            continue;
        }
        best = std::max(best, depth);
        stack.emplace_back(nodes_[node].left, depth + 1);
        stack.emplace_back(nodes_[node].right, depth + 1);
    }
    return best;
}

namespace {

struct Farther {
    bool operator()(const Neighbor& a, const Neighbor& b) const {
        return a.sq_distance < b.sq_distance || (a.sq_distance == b.sq_distance && a.index < b.index);
    }
};

} // namespace

std::vector<Neighbor> VpTree::knn(std::size_t query_index, std::size_t k, std::size_t* visited) const {
    const std::size_t n = size();
    if (query_index >= n) {
        throw std::invalid_argument("query index " + std::to_string(query_index) + " out of range");
    }
    if (k < 1 || k > n - 1) {
        throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
    }

    const auto query = points_.row(query_index);
    // Max-heap on (distance, index): top is the current worst kept neighbor.
    std::priority_queue<Neighbor, std::vector<Neighbor>, Farther> heap;
    std::size_t count = 0;

    auto bound = [&]() {
        if (heap.size() < k) {
            return std::numeric_limits<double>::infinity();
        }
        // Slack absorbs rounding in the square roots; it only widens the search.
        return std::sqrt(heap.top().sq_distance) * (1 + 1e-12) + 1e-300;
    };

    // Each entry carries a lower bound on the distance from the query to its subtree;
    // bounds are rechecked on pop because tau may have shrunk since the push.
    std::vector<std::pair<std::int32_t, double>> stack{{root(), 0.0}};
    while (!stack.empty()) {
        const auto [id, lower_bound] = stack.back();
        stack.pop_back();
        if (id == none || lower_bound > bound()) {
            continue;
        }
        ++count;
        const Node& node = nodes_[id];
        const double sq = squared_distance(query, points_.row(node.index));
        if (node.index != query_index) {
            Neighbor cand{node.index, sq};
            if (heap.size() < k) {
                heap.push(cand);
            } else if (Farther{}(cand, heap.top())) {
                heap.pop();
                heap.push(cand);
            }
        }
        if (node.left == none && node.right == none) {
            continue;
        }

        const double dist = std::sqrt(sq);
        // Push the far side first so the near side is searched first.
        if (sq <= node.sq_radius) {
            stack.emplace_back(node.right, node.radius - dist);
            stack.emplace_back(node.left, 0.0);
        } else {
            stack.emplace_back(node.left, dist - node.radius);
            stack.emplace_back(node.right, 0.0);
        }
    }

    std::vector<Neighbor> out(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    if (visited) {
        *visited = count;
    }
    return out;
}

std::vector<std::vector<Neighbor>> knn_all(const VpTree& tree, std::size_t k) {
    std::vector<std::vector<Neighbor>> out(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        out[i] = tree.knn(i, k);
    }
    return out;
}

} // namespace gtsne
