#include "gtsne/cli.hpp"

#include "gtsne/datagen.hpp"
#include "gtsne/io.hpp"
#include "gtsne/macro.hpp"
#include "gtsne/metrics.hpp"
#include "gtsne/objective.hpp"
#include "gtsne/optimizer.hpp"
#include "gtsne/pca.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace gtsne {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Keys assigned in a `key = value` config text.
std::set<std::string> config_keys(const std::string& text) {
    std::set<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = line.substr(0, line.find('#'));
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        out.insert(key);
    }
    return out;
}

// Reads a CSV, picking the `label` column automatically when the header has one.
Dataset load(const std::string& path, bool has_header, const std::string& label_col) {
    std::optional<std::string> label;
    if (!label_col.empty()) {
        label = label_col;
    } else if (has_header) {
        const std::string text = slurp(path);
        const std::string first = text.substr(0, text.find('\n'));
        std::istringstream fields(first);
        std::string field;
        while (std::getline(fields, field, ',')) {
            field.erase(std::remove_if(field.begin(), field.end(), [](char ch) { return ch == ' ' || ch == '\r' || ch == '"'; }),
                        field.end());
            if (field == "label") {
                label = "label";
            }
        }
    }
    return read_csv(path, has_header, label);
}

std::vector<Segment> parse_segments(const std::string& spec) {
    std::vector<Segment> out;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        try {
            if (colon == std::string::npos) {
                throw std::invalid_argument(item);
            }
            std::size_t used = 0;
            const auto first = std::stoul(item.substr(0, colon), &used);
            if (used != colon) {
                throw std::invalid_argument(item);
            }
            const auto rest = item.substr(colon + 1);
            const auto last = std::stoul(rest, &used);
            if (used != rest.size()) {
                throw std::invalid_argument(item);
            }
            out.emplace_back(first, last);
        } catch (const std::logic_error&) {
            throw UsageError("bad segment '" + item + "', expected start:end");
        }
    }
    if (out.empty()) {
        throw UsageError("empty segment list");
    }
    return out;
}

std::string format_real(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string format_report(const RunReport& report) {
    std::string out;
    std::istringstream cfg(serialize_config(report.config));
    std::string line;
    while (std::getline(cfg, line)) {
        out += "# " + line + "\n";
    }
    out += "# iterations_run = " + std::to_string(report.iterations_run) + "\n";
    out += "# early_stopped = " + std::string(report.early_stopped ? "true" : "false") + "\n";
    out += "# degenerate_rows = " + std::to_string(report.degenerate_rows) + "\n";
    for (const auto& [stage, seconds] : report.wall_times) {
        out += "# time_" + stage + " = " + format_real(seconds) + "\n";
    }
    out += "iteration,L,micro,macro,kmeans,momentum,estimator\n";
    for (const auto& r : report.loss_trace) {
        out += std::to_string(r.iteration) + "," + format_real(r.total) + "," + format_real(r.micro) + "," +
               format_real(r.macro) + "," + format_real(r.kmeans) + "," + format_real(r.momentum) + "," + r.estimator + "\n";
    }
    return out;
}

struct EmbedFlags {
    EmbedConfig cfg;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    std::string gradient_mode = "exact";
    bool no_center = false;
};

// Registers one flag per tunable; values are applied only when given.
void add_config_flags(CLI::App& cmd, EmbedFlags& f) {
    auto& c = f.cfg;
    auto& o = f.options;
    o["perplexity"] = cmd.add_option("--perplexity", c.perplexity, "Target perplexity");
    o["alpha"] = cmd.add_option("--alpha", c.alpha, "Macro loss weight");
    o["beta"] = cmd.add_option("--beta", c.beta, "k-means loss weight");
    o["n_clusters"] = cmd.add_option("--clusters", c.n_clusters, "Number of k-means clusters");
    o["pca_dims"] = cmd.add_option("--pca-dims", c.pca_dims, "PCA dimensions for the macro structure");
    o["out_dims"] = cmd.add_option("--out-dims", c.out_dims, "Embedding dimensions");
    o["n_neighbors"] = cmd.add_option("--neighbors", c.n_neighbors, "Neighbor list size (default 3 x perplexity)");
    o["learning_rate"] = cmd.add_option("--learning-rate", c.learning_rate, "Learning rate");
    o["momentum_initial"] = cmd.add_option("--momentum", c.momentum_initial, "Momentum before the switch");
    o["momentum_final"] = cmd.add_option("--final-momentum", c.momentum_final, "Momentum after the switch");
    o["momentum_switch_iter"] = cmd.add_option("--momentum-switch", c.momentum_switch_iter, "Iteration of the momentum switch");
    o["n_iter"] = cmd.add_option("--iterations", c.n_iter, "Maximum number of iterations");
    o["bh_theta"] = cmd.add_option("--theta", c.bh_theta, "Barnes-Hut accuracy (0 = exact)");
    o["gradient_mode"] = cmd.add_option("--gradient-mode", f.gradient_mode, "exact or paper")->check(CLI::IsMember({"exact", "paper"}));
    o["seed"] = cmd.add_option("--seed", c.seed, "Random seed");
    o["perplexity_tol"] = cmd.add_option("--perplexity-tol", c.perplexity_tol, "Perplexity tolerance");
    o["init_stddev"] = cmd.add_option("--init-stddev", c.init_stddev, "Initial embedding standard deviation");
    o["exaggeration"] = cmd.add_option("--exaggeration", c.exaggeration, "Early exaggeration factor (1 = off)");
    o["exaggeration_iter"] = cmd.add_option("--exaggeration-iter", c.exaggeration_iter, "Iterations of early exaggeration");
    o["kmeans_max_iter"] = cmd.add_option("--kmeans-iter", c.kmeans_max_iter, "Maximum Lloyd iterations");
    o["log_every"] = cmd.add_option("--log-every", c.log_every, "Loss logging interval");
    o["pca_center"] = cmd.add_flag("--pca-no-center", f.no_center, "Decompose X^T X without centering");
    cmd.add_option("--config", f.config_path, "key = value config file; flags override it")->check(CLI::ExistingFile);
}

// Merges the config file and explicit flags, then fills data-dependent defaults.
EmbedConfig resolve_config(const EmbedFlags& f, const Dataset& data, std::ostream& err) {
    EmbedConfig cfg;
    std::set<std::string> given;
    if (!f.config_path.empty()) {
        const auto text = slurp(f.config_path);
        try {
            cfg = parse_config(text);
        } catch (const std::invalid_argument& e) {
            throw UsageError(f.config_path + ": " + e.what());
        }
        given = config_keys(text);
    }

    EmbedConfig from_flags = f.cfg;
    from_flags.gradient_mode = parse_gradient_mode(f.gradient_mode);
    from_flags.pca_center = !f.no_center;
    std::istringstream lines(serialize_config(from_flags));
    std::string line;
    while (std::getline(lines, line)) {
        const auto eq = line.find(" = ");
        const auto key = line.substr(0, eq);
        auto it = f.options.find(key);
        if (it != f.options.end() && it->second->count() > 0) {
            set_config_value(cfg, key, line.substr(eq + 3));
            given.insert(key);
        }
    }

    const std::size_t n = data.size(), d = data.dims();
    if (!given.count("n_neighbors")) {
        const double wanted = std::floor(3 * cfg.perplexity);
        cfg.n_neighbors = static_cast<int>(std::min(wanted, static_cast<double>(n - 1)));
    }
    if (!given.count("pca_dims")) {
        cfg.pca_dims = static_cast<int>(std::min<std::size_t>(50, d));
    }
    if (cfg.n_clusters > static_cast<int>(n)) {
        err << "warning: n_clusters = " << cfg.n_clusters << " exceeds the " << n << " points; using " << n << "\n";
        cfg.n_clusters = static_cast<int>(n);
    }
    return cfg;
}

int cmd_generate(const std::string& kind, std::size_t ns, std::size_t n, std::size_t dims, std::size_t classes, double noise,
                 double velocity_std, double cluster_std, std::uint64_t seed, const std::string& output, std::ostream& out) {
    Dataset data;
    if (kind == "three-lines") {
        ThreeLinesSpec spec;
        spec.n_s = ns;
        spec.dims = dims;
        spec.velocity_std = velocity_std;
        spec.seed = seed;
        data = gen_three_lines(spec);
    } else if (kind == "blobs") {
        data = gen_blobs(n, dims, classes, seed, cluster_std);
    } else if (kind == "sphere") {
        data = gen_sphere(n, seed);
    } else {
        data = gen_swiss_roll(n, noise, seed);
    }
    write_csv(data, output);
    out << "wrote " << data.size() << " x " << data.dims() << " " << kind << " to " << output << "\n";
    return exit_ok;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"GTSNE: t-SNE with a k-means macro-structure loss"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
    std::string kind;
    std::size_t ns = 700, n = 0, dims = 0, classes = 5;
    double noise = 0, velocity_std = 6, cluster_std = 1;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("kind", kind, "three-lines | blobs | sphere | swiss-roll")
        ->required()
        ->check(CLI::IsMember({"three-lines", "blobs", "sphere", "swiss-roll"}));
    gen->add_option("--ns", ns, "Points per line (three-lines)");
    gen->add_option("-n,--points", n, "Number of points (blobs, sphere, swiss-roll)");
    gen->add_option("--dims", dims, "Dimensions (three-lines, blobs)");
    gen->add_option("--classes", classes, "Number of blobs");
    gen->add_option("--cluster-std", cluster_std, "Blob standard deviation");
    gen->add_option("--noise", noise, "Swiss roll noise standard deviation");
    gen->add_option("--velocity-std", velocity_std, "Three-lines step standard deviation");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("-o,--output", gen_out, "Output CSV")->required();

    // embed
    auto* emb = app.add_subcommand("embed", "Embed a CSV dataset");
    EmbedFlags flags;
    std::string emb_in, emb_out, emb_report, emb_dump_p, emb_dump_r, emb_dump_t, emb_label;
    bool emb_no_header = false, quiet = false;
    emb->add_option("-i,--input", emb_in, "Input CSV")->required();
    emb->add_option("-o,--output", emb_out, "Output embedding CSV")->required();
    emb->add_option("--label-col", emb_label, "Label column name or index");
    emb->add_flag("--no-header", emb_no_header, "Input has no header line");
    emb->add_option("--report", emb_report, "Write the loss trace as CSV");
    emb->add_option("--dump-p", emb_dump_p, "Write the affinity matrix as i,j,p CSV");
    emb->add_option("--dump-r", emb_dump_r, "Write the responsibility matrix (K rows) as CSV");
    emb->add_option("--dump-centroids", emb_dump_t, "Write the k-means centroids as CSV");
    emb->add_flag("-q,--quiet", quiet, "No progress lines");
    add_config_flags(*emb, flags);

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "Score an embedding against its input");
    std::string eva_x, eva_y, eva_out, eva_segments, eva_label;
    std::size_t eva_k = 10;
    double eva_factor = 5;
    int eva_clusters = 90, eva_pca = 0;
    std::uint64_t eva_seed = 42;
    bool eva_no_header = false, eva_no_center = false;
    eva->add_option("-x,--data", eva_x, "Input CSV")->required();
    eva->add_option("-y,--embedding", eva_y, "Embedding CSV")->required();
    eva->add_option("-o,--output", eva_out, "Scores CSV");
    eva->add_option("--label-col", eva_label, "Label column of the input");
    eva->add_flag("--no-header", eva_no_header, "Input has no header line");
    eva->add_option("--segments", eva_segments, "start:end[,start:end...] row ranges (default: three equal)");
    eva->add_option("--k", eva_k, "Neighbors for KNN preservation");
    eva->add_option("--factor", eva_factor, "Break factor over the median step");
    eva->add_option("--clusters", eva_clusters, "k-means clusters for the centroid score");
    eva->add_option("--pca-dims", eva_pca, "PCA dimensions for the centroid score (default min(50, D))");
    eva->add_flag("--pca-no-center", eva_no_center, "Uncentered PCA");
    eva->add_option("--seed", eva_seed, "Run seed, as given to embed");

    // plot
    auto* plt = app.add_subcommand("plot", "Render an embedding as SVG");
    std::string plt_y, plt_out, plt_label;
    PlotSpec plot_spec;
    plt->add_option("-y,--embedding", plt_y, "Embedding CSV")->required();
    plt->add_option("-o,--output", plt_out, "Output SVG")->required();
    plt->add_option("--label-col", plt_label, "Label column (default: 'label' when present)");
    plt->add_option("--width", plot_spec.width, "Width in pixels")->check(CLI::PositiveNumber);
    plt->add_option("--height", plot_spec.height, "Height in pixels")->check(CLI::PositiveNumber);
    plt->add_option("--radius", plot_spec.point_radius, "Point radius")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    }

    try {
        if (gen->parsed()) {
            if (n == 0) {
                n = kind == "blobs" ? 500 : kind == "sphere" ? 600 : 1000;
            }
            if (dims == 0) {
                dims = kind == "blobs" ? 10 : 3;
            }
            return cmd_generate(kind, ns, n, dims, classes, noise, velocity_std, cluster_std, gen_seed, gen_out, out);
        }

        if (emb->parsed()) {
            const Dataset data = load(emb_in, !emb_no_header, emb_label);
            const EmbedConfig cfg = resolve_config(flags, data, err);
            if (auto violations = validate_config(cfg, data.size(), data.dims()); !violations.empty()) {
                err << ConfigError(violations).what() << "\n";
                return exit_usage;
            }
            auto result = run(data, cfg, quiet ? nullptr : &err);
            write_csv(result.embedding.y, data.labels, emb_out, 17, true, "y");
            if (!emb_report.empty()) {
                write_text(emb_report, format_report(result.report));
            }
            if (!emb_dump_p.empty()) {
                write_affinities_csv(result.affinity.p, emb_dump_p);
            }
            if (!emb_dump_r.empty()) {
                write_csv(result.macro.r, std::nullopt, emb_dump_r, 17, true, "p");
            }
            if (!emb_dump_t.empty()) {
                write_csv(result.centroids.t, std::nullopt, emb_dump_t, 17, true, "z");
            }
            return exit_ok;
        }

        if (eva->parsed()) {
            const Dataset x = load(eva_x, !eva_no_header, eva_label);
            const Dataset y = load(eva_y, true, "");
            if (x.size() != y.size()) {
                throw UsageError("data has " + std::to_string(x.size()) + " rows but embedding has " + std::to_string(y.size()));
            }
            const auto segments = eva_segments.empty() ? equal_segments(x.size(), 3) : parse_segments(eva_segments);

            StructureScores scores;
            scores.knn_preservation = knn_preservation(x.x, y.x, eva_k);
            scores.line_break_fraction = line_continuity(y.x, segments, eva_factor);

            const int pca_dims = eva_pca > 0 ? eva_pca : static_cast<int>(std::min<std::size_t>(50, x.dims()));
            const auto k = static_cast<std::size_t>(std::min<long>(eva_clusters, static_cast<long>(x.size())));
            const auto pca = pca_fit(x.x, pca_dims, !eva_no_center);
            const auto centroids = kmeans_fit(pca.z, k, stage_seed(eva_seed, Stage::kmeans));
            if (k < 3) {
                err << "warning: centroid distance correlation needs at least 3 clusters, got " << k << "\n";
                scores.centroid_distance_correlation = std::numeric_limits<double>::quiet_NaN();
            } else {
                const auto r = responsibility_matrix(pca.z, centroids.t, static_cast<int>(y.dims()), pca_dims);
                scores.centroid_distance_correlation = centroid_distance_correlation(centroids.t, lowdim_centroids(y.x, r));
            }

            const std::string header = "knn_preservation,line_break_fraction,centroid_distance_correlation\n";
            const std::string row = format_real(scores.knn_preservation) + "," + format_real(scores.line_break_fraction) + "," +
                                    format_real(scores.centroid_distance_correlation) + "\n";
            if (!eva_out.empty()) {
                write_text(eva_out, header + row);
            }
            out << header << row;
            return exit_ok;
        }

        if (plt->parsed()) {
            const Dataset y = load(plt_y, true, plt_label);
            render_svg(y.x, y.labels, plot_spec, plt_out);
            return exit_ok;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

} // namespace gtsne
