#ifndef GTSNE_TESTS_FIXTURES_HPP
#define GTSNE_TESTS_FIXTURES_HPP

// Small seeded objective instances shared by the gradient tests and the acceptance run.

#include "gtsne/affinity.hpp"
#include "gtsne/macro.hpp"
#include "gtsne/pca.hpp"
#include "oracles.hpp"

#include <algorithm>

namespace fixture {

struct Instance {
    gtsne::AffinityModel p;
    gtsne::MacroAffinity m;
    gtsne::Matrix y;
};

/// Random X (n x dim), P at perplexity 4 over up to 10 neighbors, K-means on a (dim-1)-d PCA space, random Y.
inline Instance make_instance(std::size_t n, std::size_t dim, std::size_t k, std::size_t d, std::uint64_t seed,
                              double y_scale = 1.0) {
    Instance out;
    const auto x = oracle::random_matrix(n, dim, seed, 1.0);
    const std::size_t neighbors = std::min<std::size_t>(n - 1, 10);
    out.p = gtsne::compute_affinities(x, neighbors, std::min(4.0, neighbors - 1.0), 1e-10, 200, seed).p;
    const int dz = static_cast<int>(dim) - 1;
    const auto pca = gtsne::pca_fit(x, dz);
    const auto centroids = gtsne::kmeans_fit(pca.z, k, seed);
    out.m.r = gtsne::responsibility_matrix(pca.z, centroids.t, static_cast<int>(d), dz);
    out.m.p_macro = k >= 2 ? gtsne::macro_affinity(centroids.t) : gtsne::Matrix(1, 1);
    out.y = oracle::random_matrix(n, d, seed + 1000, y_scale);
    return out;
}

/// Largest |a - b| / max(1, |a|) over all entries.
inline double max_rel_error(const gtsne::Matrix& a, const gtsne::Matrix& b) {
    double worst = 0;
    for (std::size_t s = 0; s < a.values().size(); ++s) {
        worst = std::max(worst, std::abs(a.values()[s] - b.values()[s]) / std::max(1.0, std::abs(a.values()[s])));
    }
    return worst;
}

/// Four map points on a square with a circulant R, so every cluster mass is exactly 1.
inline Instance unit_mass_square() {
    Instance out;
    std::vector<gtsne::ConditionalRow> rows(4);
    for (std::size_t i = 0; i < 4; ++i) {
        rows[i].neighbors = {(i + 1) % 4, (i + 3) % 4};
        rows[i].probabilities = {0.5, 0.5};
    }
    out.p = gtsne::symmetrize(rows, 4);
    const double w[4] = {0.4, 0.3, 0.2, 0.1};
    out.m.r = gtsne::Matrix(4, 4);
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t i = 0; i < 4; ++i) {
            out.m.r(a, i) = w[(i + 4 - a) % 4];
        }
    }
    const gtsne::Matrix t(4, 2, std::vector<double>{0, 0, 3, 0, 3, 3, 0, 3});
    out.m.p_macro = gtsne::macro_affinity(t);
    out.y = gtsne::Matrix(4, 2, std::vector<double>{0.2, 0.1, 1.5, -0.3, 1.1, 1.4, -0.6, 0.9});
    return out;
}

} // namespace fixture

#endif
