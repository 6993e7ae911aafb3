#ifndef GTSNE_OBJECTIVE_HPP
#define GTSNE_OBJECTIVE_HPP

#include "gtsne/affinity.hpp"
#include "gtsne/macro.hpp"
#include "gtsne/types.hpp"

#include <span>

namespace gtsne {

/// Student-t kernel with one degree of freedom: 1 / (1 + |a - b|^2).
inline double lowdim_kernel(std::span<const double> a, std::span<const double> b) {
    return 1 / (1 + squared_distance(a, b));
}

/// Low-dimensional affinities are clamped here before taking logarithms.
inline constexpr double q_floor = 1e-300;

/**
 * @brief Loss decomposition `total = micro + alpha * macro + beta * kmeans`.
 */
struct LossParts {
    double total = 0;
    double micro = 0;
    double macro = 0;
    double kmeans = 0;
    bool q_clamped = false;
};

/// Weights and gradient variant used by the objective.
struct ObjectiveWeights {
    double alpha = 1e-2;
    double beta = 5e-2;
    GradientMode mode = GradientMode::exact;

    static ObjectiveWeights from(const EmbedConfig& cfg) { return {cfg.alpha, cfg.beta, cfg.gradient_mode}; }
};

/**
 * @brief Intermediate quantities of one gradient evaluation.
 *
 * `z_y` is the normalizer of the pairwise kernel (exact or Barnes-Hut estimate),
 * `c` the K x d responsibility-weighted centroids of the map, `q_macro` their
 * normalized pair affinities with normalizer `z_c`. `g_micro` holds the KL(P||Q)
 * part of the gradient alone; `g` is the full gradient.
 */
struct GradientWorkspace {
    double z_y = 0;
    Matrix c;
    Matrix q_macro;
    double z_c = 0;
    Matrix g;
    Matrix g_micro;
    LossParts loss;
};

/**
 * Reference loss with Z_y summed over all pairs (O(N^2)).
 * KL terms skip zero-probability pairs; q is clamped at `q_floor`.
 */
LossParts loss(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, double alpha, double beta);

inline LossParts loss(const Embedding& y, const AffinityModel& p, const MacroAffinity& m, const EmbedConfig& cfg) {
    return loss(y.y, p, m, cfg.alpha, cfg.beta);
}

/**
 * Full gradient with the micro term summed over all pairs. Fills `ws`,
 * including the loss of the same configuration. `exaggeration` scales P in the
 * attractive term only.
 */
void gradient_exact(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, const ObjectiveWeights& w,
                    GradientWorkspace& ws, double exaggeration = 1);

/**
 * Gradient with the repulsive micro term approximated by a space-partitioning tree
 * at accuracy `theta`. Macro and k-means terms are exact. `ws.loss` is computed
 * with the tree's Z_y estimate.
 */
void gradient_bh(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, const ObjectiveWeights& w, double theta,
                 GradientWorkspace& ws, double exaggeration = 1);

/// Responsibility-weighted map centroids, K x d.
Matrix lowdim_centroids(const Matrix& y, const Matrix& r);

} // namespace gtsne

#endif
