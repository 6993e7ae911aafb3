#include "gtsne/pca.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace gtsne {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fills columns [from, ncol) of `basis` with unit vectors orthogonal to all previous columns.
void complete_basis(Eigen::MatrixXd& basis, Eigen::Index from) {
    const auto dim = basis.rows();
    Eigen::Index candidate = 0;
    for (auto c = from; c < basis.cols(); ++c) {
        while (true) {
            Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, candidate++);
            for (Eigen::Index p = 0; p < c; ++p) {
                v -= basis.col(p).dot(v) * basis.col(p);
            }
            const double norm = v.norm();
            if (norm > 1e-6) {
                basis.col(c) = v / norm;
                break;
            }
        }
    }
}

} // namespace

PcaEmbedding pca_fit(const Matrix& x, int d_z, bool center, PcaRoute route) {
    const auto n = static_cast<Eigen::Index>(x.rows());
    const auto d = static_cast<Eigen::Index>(x.cols());
    if (n < 1) {
        throw std::invalid_argument("PCA needs at least one point");
    }
    if (d_z < 1 || d_z > d) {
        throw std::invalid_argument("PCA target dimension " + std::to_string(d_z) + " outside [1, " + std::to_string(d) + "]");
    }

    PcaEmbedding out;
    Matrix work;
    if (center) {
        auto [centered, means] = center_columns(x);
        work = std::move(centered);
        out.means = std::move(means);
    } else {
        for (double v : x.values()) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("non-finite entry in PCA input");
            }
        }
        work = x;
        out.means.assign(static_cast<std::size_t>(d), 0.0);
    }

    Eigen::Map<const RowMatrix> X(work.values().data(), n, d);
    const double scale = 1.0 / static_cast<double>(n);
    if (route == PcaRoute::automatic) {
        route = (d <= n ? PcaRoute::covariance : PcaRoute::gram);
    }

    Eigen::MatrixXd components(d, d_z);
    Eigen::VectorXd eigenvalues(d_z);

    if (route == PcaRoute::covariance) {
        Eigen::MatrixXd cov = (X.transpose() * X) * scale;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        // Eigen sorts ascending.
        for (int c = 0; c < d_z; ++c) {
            components.col(c) = solver.eigenvectors().col(d - 1 - c);
            eigenvalues[c] = solver.eigenvalues()[d - 1 - c];
        }
    } else {
        Eigen::MatrixXd gram = X * X.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        const double top = std::max(solver.eigenvalues()[n - 1], 0.0);
        Eigen::Index filled = 0;
        for (int c = 0; c < d_z; ++c) {
            const Eigen::Index src = n - 1 - c;
            const double mu = src >= 0 ? solver.eigenvalues()[src] : 0.0;
            if (src < 0 || mu <= top * 1e-12 || mu <= 0) {
                break;
            }
            components.col(c) = X.transpose() * solver.eigenvectors().col(src) / std::sqrt(mu);
            eigenvalues[c] = mu * scale;
            ++filled;
        }
        if (filled < d_z) {
            complete_basis(components, filled);
            for (auto c = filled; c < d_z; ++c) {
                eigenvalues[c] = 0;
            }
        }
    }

    for (int c = 0; c < d_z; ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < d; ++r) {
            if (std::abs(components(r, c)) > std::abs(components(best, c))) {
                best = r;
            }
        }
        if (components(best, c) < 0) {
            components.col(c) *= -1;
        }
        if (eigenvalues[c] < 0) {
            eigenvalues[c] = 0;
        }
    }

    RowMatrix Z = X * components;
    out.z = Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(d_z), std::vector<double>(Z.data(), Z.data() + Z.size()));
    out.components = Matrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d_z));
    for (Eigen::Index r = 0; r < d; ++r) {
        for (int c = 0; c < d_z; ++c) {
            out.components(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = components(r, c);
        }
    }
    out.eigenvalues.assign(eigenvalues.data(), eigenvalues.data() + d_z);
    return out;
}

} // namespace gtsne
