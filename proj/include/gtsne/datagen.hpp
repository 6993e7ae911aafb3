#ifndef GTSNE_DATAGEN_HPP
#define GTSNE_DATAGEN_HPP

#include "gtsne/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gtsne {

/**
 * @brief Three parallel random walks sharing one velocity sequence.
 *
 * Line l starts at `starts[l] * (1, ..., 1)` and moves by the same steps
 * v_1 .. v_{n_s - 1}, each coordinate drawn from N(0, velocity_std^2).
 */
struct ThreeLinesSpec {
    std::size_t n_s = 700;
    std::size_t dims = 3;
    double velocity_std = 6;
    std::array<double, 3> starts{0, 50, 160};
    std::uint64_t seed = 1;
};

/// Rows are ordered line by line; labels are the line id (0, 1, 2).
Dataset gen_three_lines(const ThreeLinesSpec& spec);

/// Gaussian blobs around centers drawn uniformly in a box of side 10 * cluster_std; rows grouped by class.
Dataset gen_blobs(std::size_t n = 500, std::size_t dims = 10, std::size_t n_classes = 5, std::uint64_t seed = 1,
                  double cluster_std = 1.0);

/// Uniform points on the unit sphere in R^3 (normalized Gaussian draws).
Dataset gen_sphere(std::size_t n = 600, std::uint64_t seed = 1);

struct SwissRoll {
    Dataset data;
    /// Generating angle of each row.
    std::vector<double> t;
};

/**
 * (t cos t, h, t sin t) with t ~ U[1.5 pi, 4.5 pi], h ~ U[0, 21], plus isotropic
 * Gaussian noise. Labels are the quartile of t.
 */
SwissRoll gen_swiss_roll_with_angles(std::size_t n = 1000, double noise = 0.0, std::uint64_t seed = 1);

inline Dataset gen_swiss_roll(std::size_t n = 1000, double noise = 0.0, std::uint64_t seed = 1) {
    return gen_swiss_roll_with_angles(n, noise, seed).data;
}

} // namespace gtsne

#endif
