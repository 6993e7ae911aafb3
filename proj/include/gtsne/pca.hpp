#ifndef GTSNE_PCA_HPP
#define GTSNE_PCA_HPP

#include "gtsne/types.hpp"

#include <vector>

namespace gtsne {

/**
 * @brief Projection of the input onto its leading principal axes.
 *
 * `z = (x - means) * components`, with `means` all zero when centering is off.
 * `components` is D x D_Z with orthonormal columns; `eigenvalues` are the
 * variances (second moments when uncentered) along each column, nonincreasing.
 */
struct PcaEmbedding {
    Matrix z;
    Matrix components;
    std::vector<double> eigenvalues;
    std::vector<double> means;
};

/// Which matrix to decompose. `automatic` picks covariance when D <= N.
enum class PcaRoute { automatic, covariance, gram };

/**
 * Fit PCA on the rows of `x` and project onto the top `d_z` components.
 *
 * Each component is sign-normalized so its entry of largest magnitude is positive.
 * Throws `std::invalid_argument` on non-finite input or `d_z` outside `[1, D]`.
 */
PcaEmbedding pca_fit(const Matrix& x, int d_z, bool center = true, PcaRoute route = PcaRoute::automatic);

inline PcaEmbedding pca_fit(const Dataset& data, int d_z, bool center = true) {
    return pca_fit(data.x, d_z, center);
}

} // namespace gtsne

#endif
