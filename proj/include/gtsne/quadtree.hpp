#ifndef GTSNE_QUADTREE_HPP
#define GTSNE_QUADTREE_HPP

#include "gtsne/types.hpp"

#include <span>
#include <vector>

namespace gtsne {

/**
 * @brief 2^d-ary spatial subdivision of map points (quadtree for d = 2, octree for d = 3).
 *
 * Leaves hold one distinct location; coincident points share a leaf. Each cell
 * keeps its point count and coordinate sum, so its center of mass is `sum / count`.
 */
class SpaceTree {
public:
    static constexpr int max_dims = 3;

    struct Cell {
        std::vector<double> center;
        std::vector<double> half_width;
        std::vector<double> mass_sum;
        std::size_t count = 0;
        /// Index of the first of 2^d children, or 0 for a leaf.
        std::size_t first_child = 0;
        std::vector<std::size_t> members;
    };

    /// Throws `std::invalid_argument` if `y` has zero rows or more than `max_dims` columns.
    explicit SpaceTree(const Matrix& y);

    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t dims() const { return dims_; }

    /**
     * Repulsive accumulation for point `i`: adds sum_j q~_ij^2 (y_i - y_j) to `force`
     * and returns sum_{j != i} q~_ij, both approximated with the Barnes-Hut criterion
     * `max cell width / distance to center of mass < theta`.
     */
    double repulsion(const Matrix& y, std::size_t i, double theta, std::span<double> force) const;

    /// Check the structural invariants; returns false on the first violation.
    bool consistent(const Matrix& y) const;

private:
    void insert(const Matrix& y, std::size_t i);
    void subdivide(std::size_t cell);
    bool contains(const Cell& cell, std::span<const double> point) const;

    std::size_t dims_ = 0;
    std::size_t fanout_ = 0;
    std::vector<Cell> cells_;
};

} // namespace gtsne

#endif
