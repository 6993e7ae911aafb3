#include "gtsne/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gtsne {

Dataset gen_three_lines(const ThreeLinesSpec& spec) {
    if (spec.n_s < 2) {
        throw std::invalid_argument("three-lines needs at least 2 points per line");
    }
    if (spec.dims < 1) {
        throw std::invalid_argument("three-lines needs at least 1 dimension");
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, spec.velocity_std);
    Matrix velocity(spec.n_s - 1, spec.dims);
    for (auto& v : velocity.values()) {
        v = normal(rng);
    }

    Dataset out;
    out.name = "three-lines";
    out.x = Matrix(3 * spec.n_s, spec.dims);
    out.labels = std::vector<int>(3 * spec.n_s);
    for (std::size_t line = 0; line < 3; ++line) {
        const std::size_t base = line * spec.n_s;
        for (std::size_t c = 0; c < spec.dims; ++c) {
            out.x(base, c) = spec.starts[line];
        }
        for (std::size_t i = 1; i < spec.n_s; ++i) {
            for (std::size_t c = 0; c < spec.dims; ++c) {
                out.x(base + i, c) = out.x(base + i - 1, c) + velocity(i - 1, c);
            }
        }
        std::fill_n(out.labels->begin() + static_cast<std::ptrdiff_t>(base), spec.n_s, static_cast<int>(line));
    }
    return out;
}

Dataset gen_blobs(std::size_t n, std::size_t dims, std::size_t n_classes, std::uint64_t seed, double cluster_std) {
    if (n_classes < 1) {
        throw std::invalid_argument("blobs need at least one class");
    }
    std::mt19937_64 rng(seed);
    const double half_box = 5 * cluster_std;
    std::uniform_real_distribution<double> uniform(-half_box, half_box);
    Matrix centers(n_classes, dims);
    for (auto& v : centers.values()) {
        v = half_box > 0 ? uniform(rng) : 0.0;
    }

    Dataset out;
    out.name = "blobs";
    out.x = Matrix(n, dims);
    out.labels = std::vector<int>(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const std::size_t count = n / n_classes + (c < n % n_classes ? 1 : 0);
        for (std::size_t m = 0; m < count; ++m, ++row) {
            for (std::size_t j = 0; j < dims; ++j) {
                out.x(row, j) = centers(c, j) + cluster_std * normal(rng);
            }
            (*out.labels)[row] = static_cast<int>(c);
        }
    }
    return out;
}

Dataset gen_sphere(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Dataset out;
    out.name = "sphere";
    out.x = Matrix(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = out.x.row(i);
        double norm = 0;
        do {
            norm = 0;
            for (auto& v : row) {
                v = normal(rng);
                norm += v * v;
            }
        } while (norm < 1e-24);
        norm = std::sqrt(norm);
        for (auto& v : row) {
            v /= norm;
        }
    }
    return out;
}

SwissRoll gen_swiss_roll_with_angles(std::size_t n, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(1.5 * std::numbers::pi, 4.5 * std::numbers::pi);
    std::uniform_real_distribution<double> height(0.0, 21.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SwissRoll out;
    out.data.name = "swiss-roll";
    out.data.x = Matrix(n, 3);
    out.t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = angle(rng);
        const double h = height(rng);
        out.t[i] = t;
        out.data.x(i, 0) = t * std::cos(t);
        out.data.x(i, 1) = h;
        out.data.x(i, 2) = t * std::sin(t);
        if (noise > 0) {
            for (auto& v : out.data.x.row(i)) {
                v += noise * normal(rng);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.t[a] < out.t[b]; });
    out.data.labels = std::vector<int>(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        (*out.data.labels)[order[rank]] = static_cast<int>(4 * rank / n);
    }
    return out;
}

} // namespace gtsne
