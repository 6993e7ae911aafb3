// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "gtsne/datagen.hpp"
#include "gtsne/io.hpp"
#include "gtsne/metrics.hpp"
#include "gtsne/optimizer.hpp"
#include "gtsne/quadtree.hpp"
#include "gtsne/vptree.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef GTSNE_CLI_PATH
#error "GTSNE_CLI_PATH must name the gtsne executable"
#endif

namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double fd_step = 1e-5;
constexpr double fd_tol = 1e-5;
constexpr double fd_budget_s = 5;
constexpr double mode_agree_tol = 1e-10;
constexpr double mode_differ_min = 1e-6;
constexpr double bh_exact_tol = 1e-10;
constexpr double bh_point_tol = 1e-2;
constexpr double bh_z_tol = 1e-3;
constexpr double bh_budget_s = 10;
constexpr double p_sum_tol = 1e-9;
constexpr double r_col_tol = 1e-12;
constexpr double macro_sum_tol = 1e-12;
constexpr double perp_tol = 1e-4;
constexpr double descent_budget_s = 60;
constexpr double break_ceiling = 0.05;
constexpr int corr_wins_needed = 7;
constexpr double pipeline_budget_s = 300;
constexpr int paired_seeds = 10;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* pattern, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer), pattern, args...);
    return buffer;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

gtsne::EmbedConfig desk_config(std::uint64_t seed) {
    gtsne::EmbedConfig cfg;
    cfg.n_clusters = 15;
    cfg.perplexity = 10;
    cfg.n_neighbors = 30;
    cfg.pca_dims = 3;
    cfg.n_iter = 500;
    cfg.seed = seed;
    return cfg;
}

gtsne::Dataset desk_lines(std::uint64_t seed) {
    gtsne::ThreeLinesSpec spec;
    spec.n_s = 100;
    spec.dims = 3;
    spec.seed = seed;
    return gtsne::gen_three_lines(spec);
}

void gradient_correctness() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = fixture::make_instance(15, 5, 3, 2, seed);
        gtsne::GradientWorkspace ws;
        gtsne::gradient_exact(inst.y, inst.p, inst.m, {0.01, 0.05, gtsne::GradientMode::exact}, ws);
        const auto fd = oracle::finite_difference(
            inst.y, [&](const gtsne::Matrix& y) { return gtsne::loss(y, inst.p, inst.m, 0.01, 0.05).total; }, fd_step);
        worst = std::max(worst, fixture::max_rel_error(ws.g, fd));
    }
    const double elapsed = seconds_since(start);
    report(1, worst < fd_tol && elapsed < fd_budget_s,
           fmt("gradient vs central differences: max rel err %.2e (< %.0e), %.2fs", worst, fd_tol, elapsed));
}

void paper_mode_consistency() {
    auto max_diff = [](const fixture::Instance& inst) {
        gtsne::GradientWorkspace paper, exact;
        gtsne::gradient_exact(inst.y, inst.p, inst.m, {0.01, 0.05, gtsne::GradientMode::paper}, paper);
        gtsne::gradient_exact(inst.y, inst.p, inst.m, {0.01, 0.05, gtsne::GradientMode::exact}, exact);
        double diff = 0;
        for (std::size_t s = 0; s < paper.g.values().size(); ++s) {
            diff = std::max(diff, std::abs(paper.g.values()[s] - exact.g.values()[s]));
        }
        return diff;
    };
    const double symmetric = max_diff(fixture::unit_mass_square());
    const double unbalanced = max_diff(fixture::make_instance(15, 5, 3, 2, 2));
    report(2, symmetric < mode_agree_tol && unbalanced > mode_differ_min,
           fmt("paper vs exact: symmetric unit-mass instance max diff %.1e (< %.0e), unbalanced %.2e (> %.0e)", symmetric,
               mode_agree_tol, unbalanced, mode_differ_min));
}

void barnes_hut_fidelity() {
    const auto start = std::chrono::steady_clock::now();
    const gtsne::ObjectiveWeights w{0.01, 0.05, gtsne::GradientMode::exact};
    auto compare = [&](const fixture::Instance& inst, double theta) {
        gtsne::GradientWorkspace exact, bh;
        gtsne::gradient_exact(inst.y, inst.p, inst.m, w, exact);
        gtsne::gradient_bh(inst.y, inst.p, inst.m, w, theta, bh);
        double worst = 0;
        for (std::size_t i = 0; i < inst.y.rows(); ++i) {
            double diff = 0, norm = 0;
            for (std::size_t d = 0; d < inst.y.cols(); ++d) {
                diff += std::pow(bh.g_micro(i, d) - exact.g_micro(i, d), 2);
                norm += std::pow(exact.g_micro(i, d), 2);
            }
            worst = std::max(worst, std::sqrt(diff / norm));
        }
        return std::make_pair(worst, std::abs(bh.z_y - exact.z_y) / exact.z_y);
    };
    const auto [exact_err, exact_z] = compare(fixture::make_instance(200, 5, 5, 2, 3), 0.0);
    const auto [point_err, z_err] = compare(fixture::make_instance(500, 5, 5, 2, 21), 0.5);
    const double elapsed = seconds_since(start);
    report(3, exact_err < bh_exact_tol && exact_z < bh_exact_tol && point_err < bh_point_tol && z_err < bh_z_tol && elapsed < bh_budget_s,
           fmt("theta=0 rel err %.1e; theta=0.5 N=500 max per-point err %.3g (< %.0e), Z_y err %.2e (< %.0e), %.2fs", exact_err,
               point_err, bh_point_tol, z_err, bh_z_tol, elapsed));
}

void probability_normalizations() {
    struct Case {
        std::string name;
        gtsne::Dataset data;
        gtsne::EmbedConfig cfg;
    };
    std::vector<Case> cases;
    cases.push_back({"three-lines", desk_lines(1), desk_config(1)});
    gtsne::EmbedConfig standard;
    standard.pca_dims = 10;
    cases.push_back({"blobs", gtsne::gen_blobs(), standard});
    standard.pca_dims = 3;
    cases.push_back({"sphere", gtsne::gen_sphere(), standard});
    cases.push_back({"swiss-roll", gtsne::gen_swiss_roll(), standard});

    double p_err = 0, r_err = 0, pm_err = 0, qm_err = 0, perp_err = 0;
    for (auto& c : cases) {
        c.cfg.n_iter = 50;
        const auto result = gtsne::run(c.data, c.cfg);
        p_err = std::max(p_err, std::abs(result.affinity.p.total() - 1));
        const auto& r = result.macro.r;
        for (std::size_t i = 0; i < r.cols(); ++i) {
            double col = 0;
            for (std::size_t a = 0; a < r.rows(); ++a) {
                col += r(a, i);
            }
            r_err = std::max(r_err, std::abs(col - 1));
        }
        double pm = 0;
        for (double v : result.macro.p_macro.values()) {
            pm += v;
        }
        pm_err = std::max(pm_err, std::abs(pm - 1));
        gtsne::GradientWorkspace ws;
        gtsne::gradient_exact(result.embedding.y, result.affinity.p, result.macro, gtsne::ObjectiveWeights::from(c.cfg), ws);
        double qm = 0;
        for (double v : ws.q_macro.values()) {
            qm += v;
        }
        qm_err = std::max(qm_err, std::abs(qm - 1));
        for (const auto& row : result.affinity.rows) {
            double h = 0;
            for (double p : row.probabilities) {
                if (p > 0) {
                    h -= p * std::log2(p);
                }
            }
            perp_err = std::max(perp_err, std::abs(std::pow(2.0, h) - c.cfg.perplexity));
        }
    }
    report(4, p_err < p_sum_tol && r_err < r_col_tol && pm_err < macro_sum_tol && qm_err < macro_sum_tol && perp_err < perp_tol,
           fmt("4 datasets: |sum P - 1| %.1e, R columns %.1e, P_macro %.1e, Q_macro %.1e, |2^H - Perp| %.1e", p_err, r_err,
               pm_err, qm_err, perp_err));
}

void knn_exactness() {
    const auto x = oracle::random_matrix(500, 10, 77);
    const auto tree = gtsne::build_vptree(x, 42);
    std::size_t mismatches = 0;
    for (std::size_t k : {1, 10, 90}) {
        for (std::size_t q = 0; q < 500; ++q) {
            const auto got = tree.knn(q, k);
            const auto want = oracle::brute_knn(x, q, k);
            for (std::size_t m = 0; m < k; ++m) {
                mismatches += got[m].index != want[m].first || got[m].sq_distance != want[m].second;
            }
        }
    }
    report(5, mismatches == 0, fmt("VP-tree vs brute force, 500 points in 10D, k in {1,10,90}: %zu mismatches", mismatches));
}

struct Paired {
    std::vector<double> gtsne_break, base_break, gtsne_corr, base_corr, gtsne_jump, base_jump;
};

// Largest consecutive within-line step relative to the embedding's bounding-box diagonal.
double max_jump_ratio(const gtsne::Matrix& y, const std::vector<gtsne::Segment>& segments) {
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t d = 0; d < 2; ++d) {
            lo[d] = std::min(lo[d], y(i, d));
            hi[d] = std::max(hi[d], y(i, d));
        }
    }
    double jump = 0;
    for (const auto& [first, last] : segments) {
        for (std::size_t i = first + 1; i < last; ++i) {
            jump = std::max(jump, std::sqrt(oracle::sqdist(y, i, y, i - 1)));
        }
    }
    return jump / std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
}

Paired descent_and_pairs() {
    Paired out;
    int descended = 0;
    double slowest = 0;
    const auto segments = gtsne::equal_segments(300, 3);
    for (int seed = 1; seed <= paired_seeds; ++seed) {
        const auto data = desk_lines(static_cast<std::uint64_t>(seed));
        auto cfg = desk_config(static_cast<std::uint64_t>(seed));
        const auto start = std::chrono::steady_clock::now();
        const auto g = gtsne::run(data, cfg);
        slowest = std::max(slowest, seconds_since(start));
        const auto& trace = g.report.loss_trace;
        descended += trace.back().total < trace.front().total;

        cfg.alpha = 0;
        cfg.beta = 0;
        const auto b = gtsne::run(data, cfg);

        for (const auto* res : {&g, &b}) {
            const bool is_g = res == &g;
            const auto& y = res->embedding.y;
            const double brk = gtsne::line_continuity(y, segments, 5.0);
            const double corr = gtsne::centroid_distance_correlation(res->centroids.t, gtsne::lowdim_centroids(y, res->macro.r));
            (is_g ? out.gtsne_break : out.base_break).push_back(brk);
            (is_g ? out.gtsne_corr : out.base_corr).push_back(corr);
            (is_g ? out.gtsne_jump : out.base_jump).push_back(max_jump_ratio(y, segments));
        }
    }
    report(6, descended == paired_seeds && slowest < descent_budget_s,
           fmt("three-lines N_s=100, 500 iters: final L < initial L on %d/%d seeds, slowest run %.2fs", descended, paired_seeds,
               slowest));
    return out;
}

void line_continuity(const Paired& runs) {
    const double g = median(runs.gtsne_break), b = median(runs.base_break);
    report(7, g <= b && g <= break_ceiling,
           fmt("median break fraction GTSNE %.4f vs baseline %.4f (need GTSNE <= baseline and <= %.2f); "
               "median largest jump / map diameter GTSNE %.3f vs baseline %.3f",
               g, b, break_ceiling, median(runs.gtsne_jump), median(runs.base_jump)));
}

void macro_preservation(const Paired& runs) {
    int wins = 0;
    for (std::size_t s = 0; s < runs.gtsne_corr.size(); ++s) {
        wins += runs.gtsne_corr[s] >= runs.base_corr[s];
    }
    report(8, wins >= corr_wins_needed,
           fmt("centroid distance correlation GTSNE >= baseline on %d/%d seeds (need %d); medians %.3f vs %.3f", wins,
               paired_seeds, corr_wins_needed, median(runs.gtsne_corr), median(runs.base_corr)));
}

int shell(const std::string& command) {
    const int status = std::system((command + " >/dev/null 2>&1").c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism(const fs::path& dir) {
    const std::string cli = GTSNE_CLI_PATH;
    const auto data = (dir / "det.csv").string();
    bool ok = shell(cli + " generate three-lines --ns 100 --seed 3 -o " + data) == 0;
    for (const char* tag : {"a", "b"}) {
        const auto y = (dir / (std::string("det_") + tag + ".csv")).string();
        ok = ok && shell(cli + " embed -i " + data + " -o " + y + " --clusters 15 --perplexity 10 --iterations 300 --seed 9 -q") == 0;
        ok = ok && shell(cli + " plot -y " + y + " -o " + (dir / (std::string("det_") + tag + ".svg")).string()) == 0;
    }
    const bool same_csv = ok && slurp(dir / "det_a.csv") == slurp(dir / "det_b.csv") && !slurp(dir / "det_a.csv").empty();
    const bool same_svg = ok && slurp(dir / "det_a.svg") == slurp(dir / "det_b.svg") && !slurp(dir / "det_a.svg").empty();
    report(9, same_csv && same_svg,
           fmt("two identical CLI runs: CSV %s, SVG %s", same_csv ? "byte-identical" : "differ", same_svg ? "byte-identical" : "differ"));
}

void pipeline_smoke(const fs::path& dir) {
    const std::string cli = GTSNE_CLI_PATH;
    const auto start = std::chrono::steady_clock::now();
    struct Job {
        std::string name, generate;
    };
    const std::vector<Job> jobs{{"blobs", "blobs --points 500 --dims 10 --classes 5"},
                                {"sphere", "sphere --points 600"},
                                {"swiss-roll", "swiss-roll --points 1000"}};
    std::string detail;
    bool ok = true;
    for (const auto& job : jobs) {
        const auto base = (dir / job.name).string();
        int codes[4] = {shell(cli + " generate " + job.generate + " -o " + base + ".csv"),
                        shell(cli + " embed -i " + base + ".csv -o " + base + "_y.csv -q"),
                        shell(cli + " evaluate -x " + base + ".csv -y " + base + "_y.csv -o " + base + "_scores.csv"),
                        shell(cli + " plot -y " + base + "_y.csv -o " + base + ".svg")};
        bool finite = false;
        if (std::all_of(std::begin(codes), std::end(codes), [](int c) { return c == 0; })) {
            const auto scores = gtsne::read_csv(base + "_scores.csv", true);
            finite = std::all_of(scores.x.values().begin(), scores.x.values().end(), [](double v) { return std::isfinite(v); });
        }
        const bool job_ok = finite && codes[0] == 0 && codes[1] == 0 && codes[2] == 0 && codes[3] == 0;
        ok = ok && job_ok;
        detail += fmt("%s exit %d/%d/%d/%d%s; ", job.name.c_str(), codes[0], codes[1], codes[2], codes[3],
                      finite ? " finite" : " NOT finite");
    }
    const double elapsed = seconds_since(start);
    report(10, ok && elapsed < pipeline_budget_s, detail + fmt("%.1fs total", elapsed));
}

} // namespace

int main() {
    const auto dir = fs::temp_directory_path() / "gtsne_acceptance";
    fs::create_directories(dir);

    gradient_correctness();
    paper_mode_consistency();
    barnes_hut_fidelity();
    probability_normalizations();
    knn_exactness();
    const auto runs = descent_and_pairs();
    line_continuity(runs);
    macro_preservation(runs);
    determinism(dir);
    pipeline_smoke(dir);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
