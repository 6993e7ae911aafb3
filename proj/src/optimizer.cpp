#include "gtsne/optimizer.hpp"
#include "gtsne/quadtree.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace gtsne {

namespace {

constexpr double stall_threshold = 1e-7;
constexpr int stall_window = 50;
// Above this size the logged loss uses the Barnes-Hut normalizer instead of all pairs.
constexpr std::size_t exact_loss_limit = 5000;

class StageClock {
public:
    explicit StageClock(RunReport& report) : report_(report), start_(std::chrono::steady_clock::now()) {}

    void lap(const std::string& stage) {
        const auto now = std::chrono::steady_clock::now();
        report_.wall_times.emplace_back(stage, std::chrono::duration<double>(now - start_).count());
        start_ = now;
    }

private:
    RunReport& report_;
    std::chrono::steady_clock::time_point start_;
};

template<typename Fn>
auto staged(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

} // namespace

std::uint64_t stage_seed(std::uint64_t seed, Stage stage) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stage) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Embedding init_embedding(std::size_t n, std::size_t d, double stddev, std::uint64_t seed) {
    Embedding out{Matrix(n, d)};
    if (stddev == 0) {
        return out;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, stddev);
    for (auto& v : out.y.values()) {
        v = normal(rng);
    }
    return out;
}

void gains_update(Matrix& gains, const Matrix& g, const Matrix& u) {
    auto& gv = gains.values();
    const auto& grad = g.values();
    const auto& mom = u.values();
    for (std::size_t s = 0; s < gv.size(); ++s) {
        const bool disagree = (grad[s] > 0 && mom[s] < 0) || (grad[s] < 0 && mom[s] > 0);
        gv[s] = disagree ? gv[s] + 0.2 : gv[s] * 0.8;
        if (gv[s] < gain_floor) {
            gv[s] = gain_floor;
        }
    }
}

void step(Matrix& y, OptimizerState& state, const Matrix& g, double eta, double gamma) {
    for (std::size_t s = 0; s < g.values().size(); ++s) {
        if (!std::isfinite(g.values()[s])) {
            throw std::runtime_error("non-finite gradient at point " + std::to_string(s / g.cols()) + " after " +
                                     std::to_string(state.iter) + " iterations");
        }
    }
    gains_update(state.gains, g, state.u);
    auto& u = state.u.values();
    auto& pos = y.values();
    for (std::size_t s = 0; s < u.size(); ++s) {
        u[s] = gamma * u[s] - eta * state.gains.values()[s] * g.values()[s];
        pos[s] += u[s];
    }
    ++state.iter;
}

RunResult run(const Dataset& data, const EmbedConfig& cfg, std::ostream* progress) {
    staged("validate", [&] {
        data.validate();
        return checked_config(cfg, data.size(), data.dims());
    });

    RunResult out;
    out.report.config = cfg;
    out.report.seed = cfg.seed;
    StageClock clock(out.report);
    const std::size_t n = data.size();
    const auto d = static_cast<std::size_t>(cfg.out_dims);

    out.pca = staged("pca", [&] { return pca_fit(data.x, cfg.pca_dims, cfg.pca_center); });
    clock.lap("pca");

    out.centroids = staged("kmeans", [&] {
        return kmeans_fit(out.pca.z, static_cast<std::size_t>(cfg.n_clusters), stage_seed(cfg.seed, Stage::kmeans), cfg.kmeans_max_iter);
    });
    clock.lap("kmeans");

    out.macro = staged("macro", [&] {
        MacroAffinity m;
        m.r = responsibility_matrix(out.pca.z, out.centroids.t, cfg.out_dims, cfg.pca_dims);
        m.p_macro = cfg.n_clusters >= 2 ? macro_affinity(out.centroids.t) : Matrix(1, 1);
        return m;
    });
    clock.lap("macro");

    out.affinity = staged("affinity", [&] {
        return compute_affinities(data.x, static_cast<std::size_t>(cfg.n_neighbors), cfg.perplexity, cfg.perplexity_tol,
                                  cfg.perplexity_max_iter, stage_seed(cfg.seed, Stage::neighbors));
    });
    out.report.degenerate_rows = out.affinity.degenerate_rows;
    clock.lap("affinity");

    out.embedding = init_embedding(n, d, cfg.init_stddev, stage_seed(cfg.seed, Stage::init));
    Matrix& y = out.embedding.y;
    OptimizerState state(n, d);
    GradientWorkspace ws;
    const auto weights = ObjectiveWeights::from(cfg);
    const bool use_tree = d <= static_cast<std::size_t>(SpaceTree::max_dims);

    auto record = [&](int iter, double momentum, const LossParts& bh_loss) {
        LossRecord rec;
        rec.iteration = iter;
        rec.momentum = momentum;
        LossParts parts = bh_loss;
        if (n <= exact_loss_limit || !use_tree) {
            parts = loss(y, out.affinity.p, out.macro, cfg.alpha, cfg.beta);
            rec.estimator = "exact";
        } else {
            rec.estimator = "barnes-hut";
        }
        rec.micro = parts.micro;
        rec.macro = parts.macro;
        rec.kmeans = parts.kmeans;
        rec.total = parts.micro + cfg.alpha * parts.macro + cfg.beta * parts.kmeans;
        out.report.q_clamped = out.report.q_clamped || parts.q_clamped;
        out.report.loss_trace.push_back(rec);
        if (progress) {
            char line[256];
            std::snprintf(line, sizeof(line), "iter=%d L=%.6g micro=%.6g macro=%.6g kmeans=%.6g\n", rec.iteration, rec.total,
                          rec.micro, rec.macro, rec.kmeans);
            *progress << line << std::flush;
        }
    };

    int stalled = 0;
    double momentum = cfg.momentum_initial;
    staged("optimize", [&] {
        for (int iter = 0; iter < cfg.n_iter; ++iter) {
            momentum = iter < cfg.momentum_switch_iter ? cfg.momentum_initial : cfg.momentum_final;
            const double exaggeration = iter < cfg.exaggeration_iter ? cfg.exaggeration : 1.0;
            if (use_tree) {
                gradient_bh(y, out.affinity.p, out.macro, weights, cfg.bh_theta, ws, exaggeration);
            } else {
                gradient_exact(y, out.affinity.p, out.macro, weights, ws, exaggeration);
            }
            if (iter % cfg.log_every == 0) {
                record(iter, momentum, ws.loss);
            }

            step(y, state, ws.g, cfg.learning_rate, momentum);

            double largest = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double sq = 0;
                for (auto v : state.u.row(i)) {
                    sq += v * v;
                }
                largest = std::max(largest, sq);
            }
            stalled = std::sqrt(largest) < stall_threshold ? stalled + 1 : 0;
            out.report.iterations_run = iter + 1;
            if (stalled >= stall_window) {
                out.report.early_stopped = true;
                break;
            }
        }
        return 0;
    });

    LossParts final_parts;
    if (use_tree && n > exact_loss_limit) {
        gradient_bh(y, out.affinity.p, out.macro, weights, cfg.bh_theta, ws);
        final_parts = ws.loss;
    }
    record(out.report.iterations_run, momentum, final_parts);
    clock.lap("optimize");
    return out;
}

} // namespace gtsne
