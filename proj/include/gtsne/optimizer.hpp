#ifndef GTSNE_OPTIMIZER_HPP
#define GTSNE_OPTIMIZER_HPP

#include "gtsne/affinity.hpp"
#include "gtsne/macro.hpp"
#include "gtsne/objective.hpp"
#include "gtsne/pca.hpp"
#include "gtsne/types.hpp"

#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace gtsne {

/// Per-coordinate learning-rate multipliers never drop below this.
inline constexpr double gain_floor = 0.01;

struct OptimizerState {
    Matrix u;
    Matrix gains;
    int iter = 0;

    OptimizerState() = default;
    OptimizerState(std::size_t n, std::size_t d) : u(n, d, 0.0), gains(n, d, 1.0) {}
};

/// Random streams drawn from one run seed.
enum class Stage : std::uint64_t { kmeans = 0, neighbors = 1, init = 2 };

/// Independent seed for `stage`, derived from the run seed.
std::uint64_t stage_seed(std::uint64_t seed, Stage stage);

/// I.i.d. N(0, stddev^2) entries, reproducible per seed.
Embedding init_embedding(std::size_t n, std::size_t d, double stddev, std::uint64_t seed);

/**
 * Jacobs-style gain adaptation: +0.2 where gradient and momentum disagree in sign,
 * x0.8 otherwise, then clamp at `gain_floor`. A zero on either side counts as agreement.
 */
void gains_update(Matrix& gains, const Matrix& g, const Matrix& u);

/**
 * One update in order gains -> momentum -> positions:
 * `u = gamma * u - eta * gains * g; y = y + u`.
 * Throws `std::runtime_error` if `g` holds a non-finite value.
 */
void step(Matrix& y, OptimizerState& state, const Matrix& g, double eta, double gamma);

/// Raised by `run` with the failing pipeline stage in the message.
class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// Everything a run produces, including the fitted intermediate models.
struct RunResult {
    Embedding embedding;
    RunReport report;
    PcaEmbedding pca;
    CentroidModel centroids;
    MacroAffinity macro;
    AffinityResult affinity;
};

/**
 * Full pipeline: PCA, k-means, responsibilities, macro affinities, KNN, P, then
 * gradient descent with gains and momentum. Stops after `cfg.n_iter` iterations or
 * once the largest per-point update stays below 1e-7 for 50 iterations in a row.
 * Progress lines go to `progress` when non-null.
 */
RunResult run(const Dataset& data, const EmbedConfig& cfg, std::ostream* progress = nullptr);

} // namespace gtsne

#endif
