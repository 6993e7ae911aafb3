#ifndef GTSNE_VPTREE_HPP
#define GTSNE_VPTREE_HPP

#include "gtsne/types.hpp"

#include <cstdint>
#include <vector>

namespace gtsne {

/// A neighbor of a query point with its squared Euclidean distance.
struct Neighbor {
    std::size_t index;
    double sq_distance;

    bool operator==(const Neighbor&) const = default;
};

/**
 * @brief Vantage-point tree for exact Euclidean k-nearest-neighbor search.
 *
 * Every point is a node. Each node splits its descendants at the median
 * distance to the vantage point: the left subtree holds points at distance
 * <= radius (ties go left), the right subtree points strictly farther.
 * Vantage points are chosen uniformly at random from the build seed.
 *
 * The tree owns a copy of the points; queries are const and may run concurrently.
 */
class VpTree {
public:
    static constexpr std::int32_t none = -1;

    struct Node {
        std::size_t index = 0;
        double sq_radius = 0;
        double radius = 0;
        std::int32_t left = none;
        std::int32_t right = none;
    };

    VpTree(Matrix points, std::uint64_t seed);

    std::size_t size() const { return points_.rows(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::int32_t root() const { return nodes_.empty() ? none : 0; }
    const Matrix& points() const { return points_; }

    /// Longest root-to-leaf path, counted in nodes.
    std::size_t height() const;

    /**
     * The `k` nearest other points to point `query_index`, ascending by
     * squared distance with ties broken by lower index.
     * Throws `std::invalid_argument` unless `1 <= k <= N-1`.
     * `visited`, when given, receives the number of nodes examined.
     */
    std::vector<Neighbor> knn(std::size_t query_index, std::size_t k, std::size_t* visited = nullptr) const;

private:
    std::int32_t build(std::vector<std::size_t>& items, std::size_t lower, std::size_t upper, std::uint64_t& state);

    Matrix points_;
    std::vector<Node> nodes_;
};

inline VpTree build_vptree(const Matrix& points, std::uint64_t seed) {
    return VpTree(points, seed);
}

/// All-points KNN: row `i` holds the neighbors of point `i`.
std::vector<std::vector<Neighbor>> knn_all(const VpTree& tree, std::size_t k);

} // namespace gtsne

#endif
