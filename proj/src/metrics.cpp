#include "gtsne/metrics.hpp"
#include "gtsne/vptree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gtsne {

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t s = 0; s < n;) {
        std::size_t e = s;
        while (e < n && values[order[e]] == values[order[s]]) {
            ++e;
        }
        const double rank = (static_cast<double>(s) + static_cast<double>(e - 1)) / 2;
        for (std::size_t m = s; m < e; ++m) {
            ranks[order[m]] = rank;
        }
        s = e;
    }
    return ranks;
}

std::vector<double> pairwise_distances(const Matrix& m) {
    std::vector<double> out;
    for (std::size_t a = 0; a < m.rows(); ++a) {
        for (std::size_t b = a + 1; b < m.rows(); ++b) {
            out.push_back(std::sqrt(squared_distance(m.row(a), m.row(b))));
        }
    }
    return out;
}

} // namespace

double knn_preservation(const Matrix& x, const Matrix& y, std::size_t k) {
    const std::size_t n = x.rows();
    if (y.rows() != n) {
        throw std::invalid_argument("data and embedding differ in point count");
    }
    if (k < 1 || k + 1 > n) {
        throw std::invalid_argument("k = " + std::to_string(k) + " outside [1, N-1]");
    }

    const VpTree high(x, 0);
    const VpTree low(y, 0);
    double total = 0;
    std::vector<std::size_t> a(k), b(k), common;
    for (std::size_t i = 0; i < n; ++i) {
        const auto na = high.knn(i, k);
        const auto nb = low.knn(i, k);
        for (std::size_t m = 0; m < k; ++m) {
            a[m] = na[m].index;
            b[m] = nb[m].index;
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        common.clear();
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        total += static_cast<double>(common.size()) / static_cast<double>(k);
    }
    return total / static_cast<double>(n);
}

double line_continuity(const Matrix& y, const std::vector<Segment>& segments, double factor) {
    if (!(factor > 1)) {
        throw std::invalid_argument("break factor must exceed 1");
    }
    std::vector<Segment> sorted = segments;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t s = 0; s < sorted.size(); ++s) {
        if (sorted[s].second > y.rows() || sorted[s].second < sorted[s].first + 2) {
            throw std::invalid_argument("each segment needs at least 2 rows inside the embedding");
        }
        if (s > 0 && sorted[s].first < sorted[s - 1].second) {
            throw std::invalid_argument("segments overlap");
        }
    }

    std::size_t pairs = 0, breaks = 0;
    std::vector<double> gaps, scratch;
    for (const auto& [first, last] : sorted) {
        gaps.clear();
        for (std::size_t i = first; i + 1 < last; ++i) {
            gaps.push_back(std::sqrt(squared_distance(y.row(i), y.row(i + 1))));
        }
        scratch = gaps;
        std::sort(scratch.begin(), scratch.end());
        const std::size_t m = scratch.size();
        const double median = m % 2 ? scratch[m / 2] : (scratch[m / 2 - 1] + scratch[m / 2]) / 2;
        for (double g : gaps) {
            breaks += g > factor * median;
        }
        pairs += gaps.size();
    }
    return pairs == 0 ? 0.0 : static_cast<double>(breaks) / static_cast<double>(pairs);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("rank correlation needs two equal-length samples of size >= 2");
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0 || vb == 0) {
        return 0;
    }
    return cov / std::sqrt(va * vb);
}

double centroid_distance_correlation(const Matrix& t, const Matrix& c) {
    if (t.rows() != c.rows()) {
        throw std::invalid_argument("centroid sets differ in size");
    }
    if (t.rows() < 3) {
        throw std::invalid_argument("centroid distance correlation needs at least 3 centroids");
    }
    return spearman(pairwise_distances(t), pairwise_distances(c));
}

std::vector<Segment> equal_segments(std::size_t n, std::size_t count) {
    std::vector<Segment> out;
    const std::size_t size = n / count;
    for (std::size_t s = 0; s < count; ++s) {
        out.emplace_back(s * size, s + 1 == count ? n : (s + 1) * size);
    }
    return out;
}

} // namespace gtsne
