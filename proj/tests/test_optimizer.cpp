#include <gtest/gtest.h>

#include "gtsne/datagen.hpp"
#include "gtsne/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace {

gtsne::EmbedConfig desk_config() {
    gtsne::EmbedConfig cfg;
    cfg.n_clusters = 15;
    cfg.perplexity = 10;
    cfg.n_neighbors = 30;
    cfg.pca_dims = 3;
    cfg.n_iter = 300;
    return cfg;
}

gtsne::Dataset desk_lines(std::uint64_t seed) {
    gtsne::ThreeLinesSpec spec;
    spec.n_s = 100;
    spec.seed = seed;
    return gtsne::gen_three_lines(spec);
}

} // namespace

TEST(InitEmbedding, DeterministicPerSeed) {
    const auto a = gtsne::init_embedding(50, 2, 1e-2, 3);
    const auto b = gtsne::init_embedding(50, 2, 1e-2, 3);
    const auto c = gtsne::init_embedding(50, 2, 1e-2, 4);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.y, c.y);
}

TEST(InitEmbedding, SampleSpread) {
    const auto e = gtsne::init_embedding(10000, 2, 1e-2, 5);
    double mean = 0, sq = 0;
    for (double v : e.y.values()) {
        mean += v;
        sq += v * v;
    }
    mean /= 20000;
    const double sd = std::sqrt(sq / 20000 - mean * mean);
    EXPECT_GE(sd, 0.009);
    EXPECT_LE(sd, 0.011);
}

TEST(InitEmbedding, ZeroSpread) {
    EXPECT_EQ(gtsne::init_embedding(7, 3, 0.0, 1).y, gtsne::Matrix(7, 3));
}

TEST(Gains, MultiplyWhenSignsAgree) {
    gtsne::Matrix gains(1, 1, 1.0);
    gtsne::gains_update(gains, gtsne::Matrix(1, 1, 0.5), gtsne::Matrix(1, 1, 0.2));
    EXPECT_DOUBLE_EQ(gains(0, 0), 0.8);
}

TEST(Gains, AddWhenSignsDisagree) {
    gtsne::Matrix gains(1, 1, 1.0);
    gtsne::gains_update(gains, gtsne::Matrix(1, 1, 0.5), gtsne::Matrix(1, 1, -0.2));
    EXPECT_DOUBLE_EQ(gains(0, 0), 1.2);
}

TEST(Gains, Floor) {
    gtsne::Matrix gains(1, 1, 0.012);
    gtsne::gains_update(gains, gtsne::Matrix(1, 1, -1.0), gtsne::Matrix(1, 1, -1.0));
    EXPECT_EQ(gains(0, 0), gtsne::gain_floor);
}

TEST(Gains, ZeroCountsAsAgreement) {
    gtsne::Matrix gains(1, 3, 1.0);
    gtsne::gains_update(gains, gtsne::Matrix(1, 3, std::vector<double>{0, 1, 0}),
                        gtsne::Matrix(1, 3, std::vector<double>{1, 0, 0}));
    for (double v : gains.values()) {
        EXPECT_DOUBLE_EQ(v, 0.8);
    }
}

TEST(Step, ZeroGradientZeroMomentumIsFixedPoint) {
    gtsne::Matrix y(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
    const auto before = y;
    gtsne::OptimizerState state(3, 2);
    gtsne::step(y, state, gtsne::Matrix(3, 2), 200, 0.5);
    EXPECT_EQ(y, before);
    EXPECT_EQ(state.iter, 1);
}

TEST(Step, PlainGradientDescent) {
    gtsne::Matrix y(2, 2, std::vector<double>{1, 2, 3, 4});
    gtsne::OptimizerState state(2, 2);
    // First step: u = 0 so signs count as agreeing and gains become 0.8; reset to 1 to isolate the update.
    const gtsne::Matrix g(2, 2, std::vector<double>{0.5, -1, 0.25, 2});
    state.gains = gtsne::Matrix(2, 2, 1.25);
    gtsne::step(y, state, g, 1.0, 0.0);
    EXPECT_EQ(y, gtsne::Matrix(2, 2, std::vector<double>{0.5, 3, 2.75, 2}));
}

TEST(Step, HandArithmetic) {
    gtsne::Matrix y(1, 1, 4.0);
    gtsne::OptimizerState state(1, 1);
    state.u(0, 0) = 0.3;
    state.gains(0, 0) = 1.0 / 0.8;
    // g and u share a sign, so the gain becomes exactly 1 before the update.
    gtsne::step(y, state, gtsne::Matrix(1, 1, 0.1), 2.0, 0.5);
    EXPECT_NEAR(state.gains(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(state.u(0, 0), -0.05, 1e-15);
    EXPECT_NEAR(y(0, 0), 3.95, 1e-15);
}

TEST(Step, RejectsNonFiniteGradient) {
    gtsne::Matrix y(1, 2);
    gtsne::OptimizerState state(1, 2);
    EXPECT_THROW(gtsne::step(y, state, gtsne::Matrix(1, 2, std::vector<double>{0, NAN}), 1, 0), std::runtime_error);
}

TEST(Run, DescendsOnDeskThreeLines) {
    const auto data = desk_lines(3);
    auto cfg = desk_config();
    const auto result = gtsne::run(data, cfg);
    const auto& trace = result.report.loss_trace;
    ASSERT_GE(trace.size(), 2u);
    EXPECT_LT(trace.back().total, trace.front().total);
    EXPECT_EQ(trace.front().iteration, 0);
    EXPECT_EQ(trace.back().iteration, result.report.iterations_run);
    for (double v : result.embedding.y.values()) {
        EXPECT_TRUE(std::isfinite(v));
    }
    ASSERT_EQ(result.report.wall_times.size(), 5u);
    EXPECT_EQ(result.report.wall_times.front().first, "pca");
    EXPECT_EQ(result.report.wall_times.back().first, "optimize");
}

TEST(Run, LossIdentityAndMomentumSwitch) {
    const auto data = desk_lines(4);
    auto cfg = desk_config();
    cfg.log_every = 10;
    cfg.momentum_switch_iter = 100;
    std::ostringstream progress;
    const auto result = gtsne::run(data, cfg, &progress);
    for (const auto& rec : result.report.loss_trace) {
        const double rebuilt = rec.micro + cfg.alpha * rec.macro + cfg.beta * rec.kmeans;
        EXPECT_NEAR(rec.total, rebuilt, 1e-10 * std::abs(rebuilt));
        if (rec.iteration < cfg.n_iter) {
            EXPECT_EQ(rec.momentum, rec.iteration < 100 ? cfg.momentum_initial : cfg.momentum_final) << rec.iteration;
        }
        EXPECT_EQ(rec.estimator, "exact");
    }
    EXPECT_NE(progress.str().find("iter=0 L="), std::string::npos);
    EXPECT_NE(progress.str().find(" micro="), std::string::npos);
}

TEST(Run, BitIdenticalRepeat) {
    const auto data = desk_lines(5);
    auto cfg = desk_config();
    cfg.n_iter = 120;
    const auto a = gtsne::run(data, cfg);
    const auto b = gtsne::run(data, cfg);
    EXPECT_EQ(a.embedding.y, b.embedding.y);
    cfg.seed = 43;
    EXPECT_NE(gtsne::run(data, cfg).embedding.y, a.embedding.y);
}

TEST(Run, BaselineIgnoresMacroTerms) {
    const auto data = desk_lines(6);
    auto cfg = desk_config();
    cfg.n_iter = 100;
    cfg.alpha = 0;
    cfg.beta = 0;
    const auto result = gtsne::run(data, cfg);
    for (const auto& rec : result.report.loss_trace) {
        EXPECT_EQ(rec.total, rec.micro);
    }
    // Changing the cluster model must not move a micro-only run.
    cfg.n_clusters = 7;
    EXPECT_EQ(gtsne::run(data, cfg).embedding.y, result.embedding.y);
}

TEST(Run, EarlyStopWhenFrozen) {
    const auto data = desk_lines(7);
    auto cfg = desk_config();
    cfg.learning_rate = 1e-12;
    cfg.n_iter = 500;
    const auto result = gtsne::run(data, cfg);
    EXPECT_TRUE(result.report.early_stopped);
    EXPECT_EQ(result.report.iterations_run, 50);
}

TEST(Run, HigherDimensionsUseExactGradient) {
    const auto data = desk_lines(8);
    auto cfg = desk_config();
    cfg.n_iter = 30;
    cfg.out_dims = 4;
    cfg.pca_dims = 3;
    EXPECT_THROW(gtsne::run(data, cfg), gtsne::StageError);
    gtsne::ThreeLinesSpec spec;
    spec.n_s = 40;
    spec.dims = 6;
    auto wide = gtsne::gen_three_lines(spec);
    cfg.pca_dims = 6;
    const auto result = gtsne::run(wide, cfg);
    EXPECT_EQ(result.embedding.y.cols(), 4u);
}

TEST(Run, StageErrorsNameTheStage) {
    const auto data = desk_lines(1);
    auto cfg = desk_config();
    cfg.n_clusters = 1000;
    try {
        gtsne::run(data, cfg);
        FAIL();
    } catch (const gtsne::StageError& e) {
        EXPECT_EQ(e.stage(), "validate");
    }
}
