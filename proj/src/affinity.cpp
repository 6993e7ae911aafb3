#include "gtsne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gtsne {

namespace {

struct RowState {
    double perplexity;
    double entropy;
};

// Fills `probs` for precision `beta` and returns the resulting perplexity.
RowState evaluate(std::span<const double> sq_distances, double min_sq, double beta, std::vector<double>& probs) {
    double sum = 0;
    for (std::size_t m = 0; m < sq_distances.size(); ++m) {
        probs[m] = std::exp(-beta * (sq_distances[m] - min_sq));
        sum += probs[m];
    }
    double weighted = 0;
    for (std::size_t m = 0; m < sq_distances.size(); ++m) {
        probs[m] /= sum;
        weighted += probs[m] * (sq_distances[m] - min_sq);
    }
    const double entropy = beta * weighted + std::log(sum);
    return {std::exp(entropy), entropy};
}

} // namespace

double row_perplexity(std::span<const double> sq_distances, double beta) {
    std::vector<double> probs(sq_distances.size());
    const double min_sq = *std::min_element(sq_distances.begin(), sq_distances.end());
    return evaluate(sq_distances, min_sq, beta, probs).perplexity;
}

ConditionalRow calibrate_row(std::span<const double> sq_distances, double target_perp, double tol, int max_iter) {
    const std::size_t k = sq_distances.size();
    if (k < 1) {
        throw std::invalid_argument("cannot calibrate an empty neighbor row");
    }
    for (double d : sq_distances) {
        if (!(d >= 0) || std::isinf(d)) {
            throw std::invalid_argument("neighbor distances must be finite and nonnegative");
        }
    }

    ConditionalRow row;
    row.probabilities.assign(k, 0.0);
    const auto [lo_it, hi_it] = std::minmax_element(sq_distances.begin(), sq_distances.end());
    const double min_sq = *lo_it;

    if (*hi_it == min_sq) {
        std::fill(row.probabilities.begin(), row.probabilities.end(), 1.0 / static_cast<double>(k));
        row.perplexity = static_cast<double>(k);
        row.degenerate = *hi_it == 0;
        row.beta = 1;
        row.sigma = std::sqrt(0.5);
        return row;
    }

    std::vector<double> probs(k);
    double beta = 1;
    double lower = 0;
    double upper = std::numeric_limits<double>::infinity();
    double best_gap = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        const auto state = evaluate(sq_distances, min_sq, beta, probs);
        const double gap = state.perplexity - target_perp;
        row.iterations = iter + 1;
        if (std::abs(gap) < best_gap) {
            best_gap = std::abs(gap);
            row.probabilities = probs;
            row.beta = beta;
            row.perplexity = state.perplexity;
        }
        if (std::abs(gap) <= tol) {
            break;
        }

        // Perplexity decreases as beta grows.
        if (gap > 0) {
            lower = beta;
            beta = std::isinf(upper) ? beta * 2 : (beta + upper) / 2;
        } else {
            upper = beta;
            beta = lower == 0 ? beta / 2 : (beta + lower) / 2;
        }
    }

    row.sigma = std::sqrt(1 / (2 * row.beta));
    return row;
}

double AffinityModel::total() const {
    double sum = 0;
    for (const auto& e : entries) {
        sum += e.p;
    }
    return 2 * sum;
}

void AffinityModel::index() {
    row_ptr.assign(n + 1, 0);
    for (const auto& e : entries) {
        ++row_ptr[e.i + 1];
        ++row_ptr[e.j + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        row_ptr[i + 1] += row_ptr[i];
    }
    col.assign(row_ptr[n], 0);
    val.assign(row_ptr[n], 0.0);
    std::vector<std::size_t> fill(row_ptr.begin(), row_ptr.end() - 1);
    // Entries are sorted by (i, j), so each CSR row comes out sorted by column.
    for (const auto& e : entries) {
        col[fill[e.j]] = e.i;
        val[fill[e.j]++] = e.p;
    }
    for (const auto& e : entries) {
        col[fill[e.i]] = e.j;
        val[fill[e.i]++] = e.p;
    }
}

AffinityModel symmetrize(const std::vector<ConditionalRow>& rows, std::size_t n) {
    if (rows.size() != n) {
        throw std::invalid_argument("expected one conditional row per point");
    }

    std::vector<AffinityEntry> raw;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        if (row.neighbors.size() != row.probabilities.size()) {
            throw std::invalid_argument("conditional row has mismatched neighbors and probabilities");
        }
        for (std::size_t m = 0; m < row.neighbors.size(); ++m) {
            const auto j = row.neighbors[m];
            if (j >= n || j == i) {
                throw std::invalid_argument("conditional row references an invalid neighbor");
            }
            raw.push_back({std::min(i, j), std::max(i, j), row.probabilities[m]});
        }
    }
    std::sort(raw.begin(), raw.end(), [](const AffinityEntry& a, const AffinityEntry& b) {
        return a.i < b.i || (a.i == b.i && a.j < b.j);
    });

    AffinityModel out;
    out.n = n;
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t s = 0; s < raw.size();) {
        std::size_t e = s;
        double sum = 0;
        while (e < raw.size() && raw[e].i == raw[s].i && raw[e].j == raw[s].j) {
            sum += raw[e].p;
            ++e;
        }
        if (sum > 0) {
            out.entries.push_back({raw[s].i, raw[s].j, sum / denom});
        }
        s = e;
    }
    out.index();
    return out;
}

AffinityResult compute_affinities(const Matrix& x, std::size_t n_neighbors, double perplexity, double tol, int max_iter, std::uint64_t seed) {
    VpTree tree(x, seed);
    const std::size_t n = x.rows();
    AffinityResult out;
    out.rows.resize(n);
    std::vector<double> sq(n_neighbors);
    for (std::size_t i = 0; i < n; ++i) {
        const auto neighbors = tree.knn(i, n_neighbors);
        for (std::size_t m = 0; m < n_neighbors; ++m) {
            sq[m] = neighbors[m].sq_distance;
        }
        auto row = calibrate_row(sq, perplexity, tol, max_iter);
        row.neighbors.resize(n_neighbors);
        for (std::size_t m = 0; m < n_neighbors; ++m) {
            row.neighbors[m] = neighbors[m].index;
        }
        out.degenerate_rows += row.degenerate;
        out.rows[i] = std::move(row);
    }
    out.p = symmetrize(out.rows, n);
    return out;
}

} // namespace gtsne
