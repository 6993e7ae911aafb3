#include "gtsne/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtsne {

namespace {

// Deeper than this, cells are narrower than double spacing allows; keep points together.
constexpr int max_depth = 64;

}

SpaceTree::SpaceTree(const Matrix& y) : dims_(y.cols()), fanout_(std::size_t{1} << y.cols()) {
    if (y.rows() == 0) {
        throw std::invalid_argument("cannot build a space tree over zero points");
    }
    if (dims_ < 1 || dims_ > max_dims) {
        throw std::invalid_argument("space tree supports 1 to 3 dimensions");
    }

    Cell root;
    root.center.resize(dims_);
    root.half_width.resize(dims_);
    root.mass_sum.assign(dims_, 0.0);
    for (std::size_t d = 0; d < dims_; ++d) {
        double lo = y(0, d), hi = y(0, d);
        for (std::size_t i = 1; i < y.rows(); ++i) {
            lo = std::min(lo, y(i, d));
            hi = std::max(hi, y(i, d));
        }
        root.center[d] = lo + (hi - lo) / 2;
        root.half_width[d] = std::max((hi - lo) / 2, 1e-12) * (1 + 1e-9);
    }
    cells_.push_back(std::move(root));

    for (std::size_t i = 0; i < y.rows(); ++i) {
        insert(y, i);
    }
}

bool SpaceTree::contains(const Cell& cell, std::span<const double> point) const {
    for (std::size_t d = 0; d < dims_; ++d) {
        if (point[d] < cell.center[d] - cell.half_width[d] || point[d] > cell.center[d] + cell.half_width[d]) {
            return false;
        }
    }
    return true;
}

void SpaceTree::subdivide(std::size_t cell) {
    const std::size_t first = cells_.size();
    for (std::size_t c = 0; c < fanout_; ++c) {
        Cell child;
        child.center.resize(dims_);
        child.half_width.resize(dims_);
        child.mass_sum.assign(dims_, 0.0);
        for (std::size_t d = 0; d < dims_; ++d) {
            const double half = cells_[cell].half_width[d] / 2;
            child.half_width[d] = half;
            child.center[d] = cells_[cell].center[d] + ((c >> d) & 1 ? half : -half);
        }
        cells_.push_back(std::move(child));
    }
    cells_[cell].first_child = first;
}

void SpaceTree::insert(const Matrix& y, std::size_t i) {
    const auto point = y.row(i);
    std::size_t cell = 0;
    for (int depth = 0;; ++depth) {
        Cell& node = cells_[cell];
        ++node.count;
        for (std::size_t d = 0; d < dims_; ++d) {
            node.mass_sum[d] += point[d];
        }

        if (node.first_child == 0) {
            const bool same_spot = !node.members.empty() &&
                std::equal(point.begin(), point.end(), y.row(node.members.front()).begin());
            if (node.members.empty() || same_spot || depth >= max_depth) {
                node.members.push_back(i);
                return;
            }

            // Push the resident points down one level, then keep descending with `i`.
            auto residents = std::move(node.members);
            node.members.clear();
            subdivide(cell);
            const std::size_t first = cells_[cell].first_child;
            for (auto r : residents) {
                std::size_t slot = 0;
                for (std::size_t d = 0; d < dims_; ++d) {
                    slot |= static_cast<std::size_t>(y(r, d) >= cells_[cell].center[d]) << d;
                }
                Cell& child = cells_[first + slot];
                ++child.count;
                for (std::size_t d = 0; d < dims_; ++d) {
                    child.mass_sum[d] += y(r, d);
                }
                child.members.push_back(r);
            }
        }

        std::size_t slot = 0;
        for (std::size_t d = 0; d < dims_; ++d) {
            slot |= static_cast<std::size_t>(point[d] >= cells_[cell].center[d]) << d;
        }
        cell = cells_[cell].first_child + slot;
    }
}

double SpaceTree::repulsion(const Matrix& y, std::size_t i, double theta, std::span<double> force) const {
    const auto point = y.row(i);
    double z = 0;
    double diff[max_dims];

    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const Cell& cell = cells_[stack.back()];
        stack.pop_back();
        if (cell.count == 0) {
            continue;
        }

        if (cell.first_child == 0) {
            for (auto j : cell.members) {
                if (j == i) {
                    continue;
                }
                double sq = 0;
                for (std::size_t d = 0; d < dims_; ++d) {
                    diff[d] = point[d] - y(j, d);
                    sq += diff[d] * diff[d];
                }
                const double q = 1 / (1 + sq);
                z += q;
                for (std::size_t d = 0; d < dims_; ++d) {
                    force[d] += q * q * diff[d];
                }
            }
            continue;
        }

        const double mass = static_cast<double>(cell.count);
        double sq = 0;
        double width = 0;
        for (std::size_t d = 0; d < dims_; ++d) {
            diff[d] = point[d] - cell.mass_sum[d] / mass;
            sq += diff[d] * diff[d];
            width = std::max(width, 2 * cell.half_width[d]);
        }

        // A cell containing the query is never summarized, so self-interaction cannot leak in.
        if (!contains(cell, point) && width < theta * std::sqrt(sq)) {
            const double q = 1 / (1 + sq);
            z += mass * q;
            for (std::size_t d = 0; d < dims_; ++d) {
                force[d] += mass * q * q * diff[d];
            }
            continue;
        }

        for (std::size_t c = 0; c < fanout_; ++c) {
            stack.push_back(cell.first_child + fanout_ - 1 - c);
        }
    }
    return z;
}

bool SpaceTree::consistent(const Matrix& y) const {
    std::vector<int> seen(y.rows(), 0);
    for (const auto& cell : cells_) {
        if (cell.first_child == 0) {
            if (cell.members.size() != cell.count) {
                return false;
            }
            for (auto j : cell.members) {
                ++seen[j];
                if (!contains(cell, y.row(j))) {
                    return false;
                }
            }
            continue;
        }
        std::size_t count = 0;
        for (std::size_t c = 0; c < fanout_; ++c) {
            count += cells_[cell.first_child + c].count;
        }
        if (count != cell.count || !cell.members.empty()) {
            return false;
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

} // namespace gtsne
