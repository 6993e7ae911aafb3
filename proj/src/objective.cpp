#include "gtsne/objective.hpp"
#include "gtsne/quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtsne {

namespace {

void check_shapes(const Matrix& y, const AffinityModel& p, const MacroAffinity& m) {
    if (p.n != y.rows() || m.r.cols() != y.rows() || m.p_macro.rows() != m.r.rows() || m.p_macro.cols() != m.r.rows()) {
        throw std::invalid_argument("embedding, affinities and macro model disagree in shape");
    }
    if (p.row_ptr.size() != p.n + 1) {
        throw std::invalid_argument("affinity model has no CSR index");
    }
}

double all_pairs_normalizer(const Matrix& y) {
    double z = 0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t j = i + 1; j < y.rows(); ++j) {
            z += lowdim_kernel(y.row(i), y.row(j));
        }
    }
    return 2 * z;
}

double micro_kl(const Matrix& y, const AffinityModel& p, double z_y, bool& clamped) {
    double kl = 0;
    for (const auto& e : p.entries) {
        double q = lowdim_kernel(y.row(e.i), y.row(e.j)) / z_y;
        if (q < q_floor) {
            q = q_floor;
            clamped = true;
        }
        kl += 2 * e.p * std::log(e.p / q);
    }
    return kl;
}

double pair_kl(const Matrix& p, const Matrix& q) {
    double kl = 0;
    for (std::size_t a = 0; a < p.rows(); ++a) {
        for (std::size_t b = 0; b < p.cols(); ++b) {
            if (a != b && p(a, b) > 0) {
                kl += p(a, b) * std::log(p(a, b) / std::max(q(a, b), q_floor));
            }
        }
    }
    return kl;
}

// Normalized Student-t affinities between the rows of `c`; returns the normalizer.
double centroid_affinities(const Matrix& c, Matrix& q) {
    const std::size_t k = c.rows();
    q = Matrix(k, k);
    double z = 0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double v = lowdim_kernel(c.row(a), c.row(b));
            q(a, b) = v;
            q(b, a) = v;
            z += 2 * v;
        }
    }
    if (z > 0) {
        for (auto& v : q.values()) {
            v /= z;
        }
    }
    return z;
}

double kmeans_loss(const Matrix& y, const Matrix& r, const Matrix& c) {
    double sum = 0;
    for (std::size_t k = 0; k < r.rows(); ++k) {
        for (std::size_t i = 0; i < y.rows(); ++i) {
            sum += r(k, i) * squared_distance(y.row(i), c.row(k));
        }
    }
    return sum / static_cast<double>(y.rows());
}

// Macro and k-means parts: fills the centroid fields and loss parts of `ws`, adds to `ws.g`.
void add_macro_terms(const Matrix& y, const MacroAffinity& m, const ObjectiveWeights& w, GradientWorkspace& ws) {
    const std::size_t n = y.rows(), d = y.cols(), k = m.r.rows();
    ws.c = lowdim_centroids(y, m.r);

    if (k >= 2) {
        ws.z_c = centroid_affinities(ws.c, ws.q_macro);
        ws.loss.macro = pair_kl(m.p_macro, ws.q_macro);
    } else {
        ws.q_macro = Matrix(k, k);
        ws.z_c = 0;
        ws.loss.macro = 0;
    }
    ws.loss.kmeans = kmeans_loss(y, m.r, ws.c);

    // sum_{k != l} w_kl (a_ki - a_li)(c_k - c_l) = 2 sum_k a_ki v_k with
    // v_k = sum_l w_kl (c_k - c_l), because w is symmetric.
    if (w.alpha != 0 && k >= 2) {
        Matrix v(k, d);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                if (a == b) {
                    continue;
                }
                const double kernel = ws.q_macro(a, b) * ws.z_c;
                const double weight = (m.p_macro(a, b) - ws.q_macro(a, b)) * kernel;
                for (std::size_t dim = 0; dim < d; ++dim) {
                    v(a, dim) += weight * (ws.c(a, dim) - ws.c(b, dim));
                }
            }
        }

        std::vector<double> mass(k, 1.0);
        if (w.mode == GradientMode::exact) {
            for (std::size_t a = 0; a < k; ++a) {
                double s = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    s += m.r(a, i);
                }
                mass[a] = s;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            auto g = ws.g.row(i);
            for (std::size_t a = 0; a < k; ++a) {
                const double coef = 4 * w.alpha * m.r(a, i) / mass[a];
                for (std::size_t dim = 0; dim < d; ++dim) {
                    g[dim] += coef * v(a, dim);
                }
            }
        }
    }

    if (w.beta != 0) {
        const double scale = 2 * w.beta / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto g = ws.g.row(i);
            for (std::size_t a = 0; a < k; ++a) {
                const double coef = scale * m.r(a, i);
                for (std::size_t dim = 0; dim < d; ++dim) {
                    g[dim] += coef * (y(i, dim) - ws.c(a, dim));
                }
            }
        }
    }
}

// Exact attractive part sum_j p_ij q~_ij (y_i - y_j), scaled by `exaggeration`.
void add_attraction(const Matrix& y, const AffinityModel& p, double scale, Matrix& out) {
    const std::size_t d = y.cols();
    for (std::size_t i = 0; i < y.rows(); ++i) {
        auto g = out.row(i);
        for (auto s = p.row_ptr[i]; s < p.row_ptr[i + 1]; ++s) {
            const auto j = p.col[s];
            const double q = lowdim_kernel(y.row(i), y.row(j));
            const double coef = scale * p.val[s] * q;
            for (std::size_t dim = 0; dim < d; ++dim) {
                g[dim] += coef * (y(i, dim) - y(j, dim));
            }
        }
    }
}

void finish(const Matrix& y, const AffinityModel& p, const ObjectiveWeights& w, GradientWorkspace& ws) {
    ws.loss.micro = micro_kl(y, p, ws.z_y, ws.loss.q_clamped);
    ws.loss.total = ws.loss.micro + w.alpha * ws.loss.macro + w.beta * ws.loss.kmeans;
    for (std::size_t s = 0; s < ws.g.values().size(); ++s) {
        ws.g.values()[s] += ws.g_micro.values()[s];
    }
}

} // namespace

Matrix lowdim_centroids(const Matrix& y, const Matrix& r) {
    const std::size_t k = r.rows(), d = y.cols();
    Matrix c(k, d);
    for (std::size_t a = 0; a < k; ++a) {
        double mass = 0;
        auto row = c.row(a);
        for (std::size_t i = 0; i < y.rows(); ++i) {
            mass += r(a, i);
            for (std::size_t dim = 0; dim < d; ++dim) {
                row[dim] += r(a, i) * y(i, dim);
            }
        }
        for (auto& v : row) {
            v /= mass;
        }
    }
    return c;
}

LossParts loss(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, double alpha, double beta) {
    check_shapes(y, p, m);
    LossParts out;
    const double z_y = all_pairs_normalizer(y);
    out.micro = micro_kl(y, p, z_y, out.q_clamped);

    const Matrix c = lowdim_centroids(y, m.r);
    if (m.r.rows() >= 2) {
        Matrix q;
        centroid_affinities(c, q);
        out.macro = pair_kl(m.p_macro, q);
    }
    out.kmeans = kmeans_loss(y, m.r, c);
    out.total = out.micro + alpha * out.macro + beta * out.kmeans;
    return out;
}

void gradient_exact(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, const ObjectiveWeights& w,
                    GradientWorkspace& ws, double exaggeration) {
    check_shapes(y, p, m);
    const std::size_t n = y.rows(), d = y.cols();
    ws.g = Matrix(n, d);
    ws.g_micro = Matrix(n, d);
    ws.loss = {};

    ws.z_y = all_pairs_normalizer(y);
    Matrix repulsion(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        auto f = repulsion.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const double q = lowdim_kernel(y.row(i), y.row(j));
            for (std::size_t dim = 0; dim < d; ++dim) {
                f[dim] += q * q * (y(i, dim) - y(j, dim));
            }
        }
    }

    add_attraction(y, p, exaggeration, ws.g_micro);
    for (std::size_t s = 0; s < ws.g_micro.values().size(); ++s) {
        auto& g = ws.g_micro.values()[s];
        g = 4 * (g - (ws.z_y > 0 ? repulsion.values()[s] / ws.z_y : 0.0));
    }

    add_macro_terms(y, m, w, ws);
    finish(y, p, w, ws);
}

void gradient_bh(const Matrix& y, const AffinityModel& p, const MacroAffinity& m, const ObjectiveWeights& w, double theta,
                 GradientWorkspace& ws, double exaggeration) {
    check_shapes(y, p, m);
    if (!(theta >= 0)) {
        throw std::invalid_argument("Barnes-Hut theta must be nonnegative");
    }
    const std::size_t n = y.rows(), d = y.cols();
    ws.g = Matrix(n, d);
    ws.g_micro = Matrix(n, d);
    ws.loss = {};

    const SpaceTree tree(y);
    Matrix repulsion(n, d);
    // Fixed summation order keeps the normalizer reproducible.
    double z_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        z_y += tree.repulsion(y, i, theta, repulsion.row(i));
    }
    ws.z_y = z_y;

    add_attraction(y, p, exaggeration, ws.g_micro);
    for (std::size_t s = 0; s < ws.g_micro.values().size(); ++s) {
        auto& g = ws.g_micro.values()[s];
        g = 4 * (g - (z_y > 0 ? repulsion.values()[s] / z_y : 0.0));
    }

    add_macro_terms(y, m, w, ws);
    finish(y, p, w, ws);
}

} // namespace gtsne
