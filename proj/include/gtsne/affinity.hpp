#ifndef GTSNE_AFFINITY_HPP
#define GTSNE_AFFINITY_HPP

#include "gtsne/types.hpp"
#include "gtsne/vptree.hpp"

#include <span>
#include <vector>

namespace gtsne {

/**
 * @brief Gaussian conditional distribution of one point over its neighbors.
 *
 * `probabilities[m]` is the conditional probability of `neighbors[m]` given the
 * row's point; `beta = 1 / (2 sigma^2)` is the calibrated precision.
 */
struct ConditionalRow {
    std::vector<std::size_t> neighbors;
    std::vector<double> probabilities;
    double beta = 1;
    double sigma = 0;
    /// exp(entropy in nats), i.e. 2^H with H in bits.
    double perplexity = 0;
    int iterations = 0;
    /// True when all neighbor distances were equal and the row fell back to uniform.
    bool degenerate = false;
};

/**
 * Binary search on the Gaussian precision until the row's perplexity is within
 * `tol` of `target_perp`. The bracket starts at beta = 1 and is doubled or halved
 * until the perplexity crosses the target, then bisected. Returns the best
 * row found if `max_iter` is exhausted first. Neighbor ids are left empty.
 */
ConditionalRow calibrate_row(std::span<const double> sq_distances, double target_perp, double tol = 1e-5, int max_iter = 200);

/// Perplexity (exp of the entropy in nats) of the row distribution at precision `beta`.
double row_perplexity(std::span<const double> sq_distances, double beta);

/// One stored pair of the symmetric affinity matrix, with `i < j`.
struct AffinityEntry {
    std::size_t i;
    std::size_t j;
    double p;
};

/**
 * @brief Sparse symmetric joint probabilities over point pairs.
 *
 * Each unordered pair is stored once in `entries` (sorted, `i < j`) and stands
 * for both `p_ij` and `p_ji`, so the entries sum to 1/2. `row_ptr`/`col`/`val`
 * give the same matrix in both directions as CSR for per-point traversal.
 */
struct AffinityModel {
    std::size_t n = 0;
    std::vector<AffinityEntry> entries;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    /// Sum over ordered pairs i != j.
    double total() const;
    /// Build the CSR view from `entries`.
    void index();
};

/// p_ij = (p_{j|i} + p_{i|j}) / (2n); `rows[i].neighbors` must be filled.
AffinityModel symmetrize(const std::vector<ConditionalRow>& rows, std::size_t n);

struct AffinityResult {
    AffinityModel p;
    std::vector<ConditionalRow> rows;
    std::size_t degenerate_rows = 0;
};

/// KNN via a vantage-point tree, per-row calibration, then symmetrization.
AffinityResult compute_affinities(const Matrix& x, std::size_t n_neighbors, double perplexity, double tol, int max_iter, std::uint64_t seed);

} // namespace gtsne

#endif
