#ifndef GTSNE_METRICS_HPP
#define GTSNE_METRICS_HPP

#include "gtsne/types.hpp"

#include <utility>
#include <vector>

namespace gtsne {

struct StructureScores {
    double knn_preservation = 0;
    double line_break_fraction = 0;
    double centroid_distance_correlation = 0;
};

/// Half-open row range [first, second).
using Segment = std::pair<std::size_t, std::size_t>;

/// Mean over points of |KNN_k(x_i) ∩ KNN_k(y_i)| / k, exact neighbors on both sides.
double knn_preservation(const Matrix& x, const Matrix& y, std::size_t k);

/**
 * Fraction of consecutive within-segment pairs whose map distance exceeds
 * `factor` times the median consecutive distance of their segment.
 * Segments must be disjoint and hold at least 2 rows; `factor` must exceed 1.
 */
double line_continuity(const Matrix& y, const std::vector<Segment>& segments, double factor = 5.0);

/// Spearman correlation between centroid pairwise distances in the two spaces. Needs K >= 3.
double centroid_distance_correlation(const Matrix& t, const Matrix& c);

/// Spearman rank correlation with average ranks for ties; 0 when either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// `count` near-equal consecutive segments covering `n` rows; the last takes the remainder.
std::vector<Segment> equal_segments(std::size_t n, std::size_t count);

} // namespace gtsne

#endif
