#include "gtsne/macro.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace gtsne {

namespace {

std::size_t nearest(std::span<const double> point, const Matrix& t, double& best_sq) {
    std::size_t best = 0;
    best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < t.rows(); ++c) {
        const double sq = squared_distance(point, t.row(c));
        if (sq < best_sq) {
            best_sq = sq;
            best = c;
        }
    }
    return best;
}

Matrix plus_plus_seeds(const Matrix& z, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = z.rows();
    Matrix t(k, z.cols());
    std::vector<double> closest(n, std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(n, false);

    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    for (std::size_t c = 0;; ++c) {
        chosen[pick] = true;
        std::copy(z.row(pick).begin(), z.row(pick).end(), t.row(c).begin());
        if (c + 1 == k) {
            break;
        }

        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            closest[i] = std::min(closest[i], squared_distance(z.row(i), t.row(c)));
            total += closest[i];
        }

        if (total > 0) {
            double target = std::uniform_real_distribution<double>(0, total)(rng);
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (closest[i] <= 0) {
                    continue;
                }
                target -= closest[i];
                pick = i;
                if (target <= 0) {
                    break;
                }
            }
        } else {
            // Every remaining point duplicates a seed; take any unchosen one.
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    rest.push_back(i);
                }
            }
            pick = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
        }
    }
    return t;
}

} // namespace

CentroidModel kmeans_fit(const Matrix& z, std::size_t k, std::uint64_t seed, int max_iter) {
    const std::size_t n = z.rows();
    const std::size_t dim = z.cols();
    if (k < 1 || k > n) {
        throw std::invalid_argument("k-means needs 1 <= k <= N, got k = " + std::to_string(k) + " for N = " + std::to_string(n));
    }

    std::mt19937_64 rng(seed);
    CentroidModel out;
    out.t = plus_plus_seeds(z, k, rng);
    out.assignment.assign(n, k);
    std::vector<double> cost(n, 0.0);
    std::vector<std::size_t> counts(k);

    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = nearest(z.row(i), out.t, cost[i]);
            changed = changed || c != out.assignment[i];
            out.assignment[i] = c;
        }
        if (!changed) {
            break;
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (auto c : out.assignment) {
            ++counts[c];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[out.assignment[i]] > 1 && (far == n || cost[i] > cost[far])) {
                    far = i;
                }
            }
            --counts[out.assignment[far]];
            out.assignment[far] = c;
            cost[far] = 0;
            counts[c] = 1;
        }

        std::fill(out.t.values().begin(), out.t.values().end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto centroid = out.t.row(out.assignment[i]);
            const auto point = z.row(i);
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += point[j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (auto& v : out.t.row(c)) {
                v /= static_cast<double>(counts[c]);
            }
        }

        double inertia = 0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(z.row(i), out.t.row(out.assignment[i]));
        }
        out.inertia_trace.push_back(inertia);
        out.iterations = iter + 1;
    }

    out.inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
        out.inertia += squared_distance(z.row(i), out.t.row(out.assignment[i]));
    }
    return out;
}

Matrix responsibility_matrix(const Matrix& z, const Matrix& t, int out_dims, int pca_dims) {
    if (z.cols() != t.cols()) {
        throw std::invalid_argument("points and centroids differ in dimension");
    }
    const std::size_t n = z.rows(), k = t.rows();
    const double scale = static_cast<double>(out_dims) * out_dims / (static_cast<double>(pca_dims) * pca_dims);
    Matrix r(k, n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = 1 / (1 + scale * squared_distance(z.row(i), t.row(c)));
            r(c, i) = v;
            sum += v;
        }
        for (std::size_t c = 0; c < k; ++c) {
            r(c, i) /= sum;
        }
    }
    return r;
}

Matrix macro_affinity(const Matrix& t) {
    const std::size_t k = t.rows();
    if (k < 2) {
        throw std::invalid_argument("macro affinities need at least 2 centroids");
    }
    Matrix p(k, k);
    double sum = 0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double v = 1 / (1 + squared_distance(t.row(a), t.row(b)));
            p(a, b) = v;
            p(b, a) = v;
            sum += 2 * v;
        }
    }
    for (auto& v : p.values()) {
        v /= sum;
    }
    return p;
}

} // namespace gtsne
