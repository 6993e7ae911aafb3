#ifndef GTSNE_TYPES_HPP
#define GTSNE_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/**
 * @file types.hpp
 *
 * @brief Shared data types, configuration and validation.
 */

namespace gtsne {

/**
 * @brief Dense row-major matrix of doubles.
 *
 * Rows are points; `row(i)` returns a view over the coordinates of point `i`.
 */
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t nrow, std::size_t ncol, double fill = 0.0)
        : nrow_(nrow), ncol_(ncol), values_(nrow * ncol, fill) {}

    Matrix(std::size_t nrow, std::size_t ncol, std::vector<double> values)
        : nrow_(nrow), ncol_(ncol), values_(std::move(values)) {
        if (values_.size() != nrow_ * ncol_) {
            throw std::invalid_argument("matrix value count does not match its shape");
        }
    }

    std::size_t rows() const { return nrow_; }
    std::size_t cols() const { return ncol_; }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * ncol_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * ncol_ + c]; }

    std::span<double> row(std::size_t r) { return {values_.data() + r * ncol_, ncol_}; }
    std::span<const double> row(std::size_t r) const { return {values_.data() + r * ncol_, ncol_}; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t nrow_ = 0;
    std::size_t ncol_ = 0;
    std::vector<double> values_;
};

/// Squared Euclidean distance between two equal-length vectors.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        out += diff * diff;
    }
    return out;
}

/**
 * @brief Input points with optional class labels.
 *
 * Invariants (checked by `validate()`): at least 2 rows, at least 1 column,
 * all entries finite, and labels (when present) have one entry per row.
 */
struct Dataset {
    Matrix x;
    std::optional<std::vector<int>> labels;
    std::string name;

    std::size_t size() const { return x.rows(); }
    std::size_t dims() const { return x.cols(); }

    /// Throws `std::invalid_argument` describing the first broken invariant.
    void validate() const;
};

/// Low-dimensional map points, one row per input point.
struct Embedding {
    Matrix y;

    std::size_t size() const { return y.rows(); }
    std::size_t dims() const { return y.cols(); }
};

enum class GradientMode {
    /// Macro term with unnormalized responsibilities.
    paper,
    /// Macro term differentiated through the responsibility-weighted centroids.
    exact
};

std::string to_string(GradientMode mode);
GradientMode parse_gradient_mode(const std::string& text);

/**
 * @brief Every tunable of an embedding run.
 */
struct EmbedConfig {
    double perplexity = 30;
    double alpha = 1e-2;
    double beta = 5e-2;
    int n_clusters = 90;
    int pca_dims = 50;
    bool pca_center = true;
    int out_dims = 2;
    int n_neighbors = 90;
    double learning_rate = 200;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    int momentum_switch_iter = 250;
    int n_iter = 1000;
    double bh_theta = 0.5;
    GradientMode gradient_mode = GradientMode::exact;
    std::uint64_t seed = 42;
    double perplexity_tol = 1e-5;
    int perplexity_max_iter = 200;
    double init_stddev = 1e-2;
    double exaggeration = 1.0;
    int exaggeration_iter = 250;
    int kmeans_max_iter = 300;
    int log_every = 50;

    bool operator==(const EmbedConfig&) const = default;
};

/// One broken configuration constraint.
struct ConfigViolation {
    std::string field;
    std::string value;
    std::string constraint;
};

/**
 * Check `cfg` against a dataset of `n` points in `d_in` dimensions.
 * Returns every violated constraint; an empty result means the config is valid.
 */
std::vector<ConfigViolation> validate_config(const EmbedConfig& cfg, std::size_t n, std::size_t d_in);

/// Thrown when a configuration fails validation; carries all violations.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations);
    const std::vector<ConfigViolation>& violations() const { return violations_; }

private:
    std::vector<ConfigViolation> violations_;
};

/// Returns `cfg` unchanged if valid, otherwise throws `ConfigError`.
EmbedConfig checked_config(const EmbedConfig& cfg, std::size_t n, std::size_t d_in);

/// Serialize as `key = value` lines in a fixed key order.
std::string serialize_config(const EmbedConfig& cfg);

/**
 * Parse `key = value` lines (blank lines and `#` comments ignored) on top of `base`.
 * Unknown keys or malformed values throw `std::invalid_argument` with the line number.
 */
EmbedConfig parse_config(const std::string& text, EmbedConfig base = {});

/// Apply a single `key`/`value` pair to `cfg`; throws on unknown key or bad value.
void set_config_value(EmbedConfig& cfg, const std::string& key, const std::string& value);

/// Column-centered copy of `x` and the subtracted column means.
std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x);

/// One logged iteration of the optimizer.
struct LossRecord {
    int iteration = 0;
    double total = 0;
    double micro = 0;
    double macro = 0;
    double kmeans = 0;
    double momentum = 0;
    /// "exact" when Z_y was summed over all pairs, "barnes-hut" otherwise.
    std::string estimator;
};

struct RunReport {
    std::vector<LossRecord> loss_trace;
    /// Stage name to wall-clock seconds, in pipeline order.
    std::vector<std::pair<std::string, double>> wall_times;
    EmbedConfig config;
    std::uint64_t seed = 0;
    int iterations_run = 0;
    bool early_stopped = false;
    /// Rows whose neighbor distances were all zero and got uniform conditionals.
    std::size_t degenerate_rows = 0;
    /// Set when any low-dimensional affinity underflowed and was clamped.
    bool q_clamped = false;
};

} // namespace gtsne

#endif
