#ifndef GTSNE_MACRO_HPP
#define GTSNE_MACRO_HPP

#include "gtsne/types.hpp"

#include <cstdint>
#include <vector>

namespace gtsne {

/**
 * @brief Result of k-means on the PCA space.
 *
 * `t` is K x D_Z; `assignment[i]` is the index of the nearest centroid of point `i`.
 * `inertia_trace` holds the objective after every Lloyd iteration.
 */
struct CentroidModel {
    Matrix t;
    std::vector<std::size_t> assignment;
    double inertia = 0;
    std::vector<double> inertia_trace;
    int iterations = 0;
};

/**
 * Lloyd iterations from k-means++ seeding. Stops at an assignment fixpoint or after
 * `max_iter` iterations. Empty clusters take the point farthest from its centroid.
 * Throws `std::invalid_argument` if `k` is 0 or exceeds the number of points.
 */
CentroidModel kmeans_fit(const Matrix& z, std::size_t k, std::uint64_t seed, int max_iter = 300);

/**
 * Soft cluster membership, K x N. Entry (k, i) is proportional to
 * 1 / (1 + (d^2 / d_z^2) |z_i - t_k|^2), normalized so each column sums to one.
 */
Matrix responsibility_matrix(const Matrix& z, const Matrix& t, int out_dims, int pca_dims);

/**
 * Centroid-pair affinities, K x K: off-diagonal Student-t kernel values divided
 * by their grand sum, zero diagonal. Throws if K < 2.
 */
Matrix macro_affinity(const Matrix& t);

struct MacroAffinity {
    Matrix r;
    Matrix p_macro;
};

} // namespace gtsne

#endif
