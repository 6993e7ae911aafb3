#include "gtsne/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gtsne {

namespace {

std::string format_real(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw std::invalid_argument("config key '" + key + "' expects a real number, got '" + value + "'");
    }
    return out;
}

template<typename Int>
Int parse_int(const std::string& key, const std::string& value) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("config key '" + key + "' expects an integer, got '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw std::invalid_argument("config key '" + key + "' expects true/false, got '" + value + "'");
}

std::string describe(const std::vector<ConfigViolation>& violations) {
    std::string out = "invalid configuration:";
    for (const auto& v : violations) {
        out += "\n  " + v.field + " = " + v.value + ": requires " + v.constraint;
    }
    return out;
}

} // namespace

void Dataset::validate() const {
    if (x.rows() < 2) {
        throw std::invalid_argument("dataset needs at least 2 points, got " + std::to_string(x.rows()));
    }
    if (x.cols() < 1) {
        throw std::invalid_argument("dataset needs at least 1 dimension");
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            if (!std::isfinite(x(i, j))) {
                throw std::invalid_argument("non-finite entry at row " + std::to_string(i) + ", column " + std::to_string(j));
            }
        }
    }
    if (labels && labels->size() != x.rows()) {
        throw std::invalid_argument("label count " + std::to_string(labels->size()) + " does not match point count " + std::to_string(x.rows()));
    }
}

std::string to_string(GradientMode mode) {
    return mode == GradientMode::paper ? "paper" : "exact";
}

GradientMode parse_gradient_mode(const std::string& text) {
    if (text == "paper") {
        return GradientMode::paper;
    }
    if (text == "exact") {
        return GradientMode::exact;
    }
    throw std::invalid_argument("gradient mode must be 'paper' or 'exact', got '" + text + "'");
}

std::vector<ConfigViolation> validate_config(const EmbedConfig& cfg, std::size_t n, std::size_t d_in) {
    std::vector<ConfigViolation> out;
    auto fail = [&](std::string field, std::string value, std::string constraint) {
        out.push_back({std::move(field), std::move(value), std::move(constraint)});
    };
    const auto N = static_cast<double>(n);

    if (!(cfg.perplexity > 0)) {
        fail("perplexity", format_real(cfg.perplexity), "perplexity > 0");
    }
    if (!(cfg.perplexity < cfg.n_neighbors)) {
        fail("n_neighbors", std::to_string(cfg.n_neighbors), "perplexity < n_neighbors");
    }
    if (cfg.n_neighbors < 1 || cfg.n_neighbors > N - 1) {
        fail("n_neighbors", std::to_string(cfg.n_neighbors), "1 <= n_neighbors <= N-1 (N=" + std::to_string(n) + ")");
    }
    if (!(cfg.alpha >= 0)) {
        fail("alpha", format_real(cfg.alpha), "alpha >= 0");
    }
    if (!(cfg.beta >= 0)) {
        fail("beta", format_real(cfg.beta), "beta >= 0");
    }
    if (cfg.n_clusters < 1) {
        fail("n_clusters", std::to_string(cfg.n_clusters), "n_clusters >= 1");
    }
    if (cfg.n_clusters > N) {
        fail("n_clusters", std::to_string(cfg.n_clusters), "n_clusters <= N (N=" + std::to_string(n) + ")");
    }
    if (cfg.pca_dims < 1) {
        fail("pca_dims", std::to_string(cfg.pca_dims), "pca_dims >= 1");
    }
    if (cfg.pca_dims > static_cast<double>(d_in)) {
        fail("pca_dims", std::to_string(cfg.pca_dims), "pca_dims <= D (D=" + std::to_string(d_in) + ")");
    }
    if (cfg.out_dims < 1) {
        fail("out_dims", std::to_string(cfg.out_dims), "out_dims >= 1");
    }
    if (!(cfg.out_dims < cfg.pca_dims)) {
        fail("out_dims", std::to_string(cfg.out_dims), "out_dims < pca_dims");
    }
    if (!(cfg.learning_rate > 0)) {
        fail("learning_rate", format_real(cfg.learning_rate), "learning_rate > 0");
    }
    if (!(cfg.momentum_initial >= 0 && cfg.momentum_initial < 1)) {
        fail("momentum_initial", format_real(cfg.momentum_initial), "0 <= momentum_initial < 1");
    }
    if (!(cfg.momentum_final >= 0 && cfg.momentum_final < 1)) {
        fail("momentum_final", format_real(cfg.momentum_final), "0 <= momentum_final < 1");
    }
    if (cfg.momentum_switch_iter < 0) {
        fail("momentum_switch_iter", std::to_string(cfg.momentum_switch_iter), "momentum_switch_iter >= 0");
    }
    if (cfg.n_iter < 1) {
        fail("n_iter", std::to_string(cfg.n_iter), "n_iter >= 1");
    }
    if (!(cfg.bh_theta >= 0)) {
        fail("bh_theta", format_real(cfg.bh_theta), "bh_theta >= 0");
    }
    if (!(cfg.perplexity_tol > 0)) {
        fail("perplexity_tol", format_real(cfg.perplexity_tol), "perplexity_tol > 0");
    }
    if (cfg.perplexity_max_iter < 1) {
        fail("perplexity_max_iter", std::to_string(cfg.perplexity_max_iter), "perplexity_max_iter >= 1");
    }
    if (!(cfg.init_stddev > 0)) {
        fail("init_stddev", format_real(cfg.init_stddev), "init_stddev > 0");
    }
    if (!(cfg.exaggeration > 0)) {
        fail("exaggeration", format_real(cfg.exaggeration), "exaggeration > 0");
    }
    if (cfg.exaggeration_iter < 0) {
        fail("exaggeration_iter", std::to_string(cfg.exaggeration_iter), "exaggeration_iter >= 0");
    }
    if (cfg.kmeans_max_iter < 1) {
        fail("kmeans_max_iter", std::to_string(cfg.kmeans_max_iter), "kmeans_max_iter >= 1");
    }
    if (cfg.log_every < 1) {
        fail("log_every", std::to_string(cfg.log_every), "log_every >= 1");
    }
    return out;
}

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

EmbedConfig checked_config(const EmbedConfig& cfg, std::size_t n, std::size_t d_in) {
    auto violations = validate_config(cfg, n, d_in);
    if (!violations.empty()) {
        throw ConfigError(std::move(violations));
    }
    return cfg;
}

std::string serialize_config(const EmbedConfig& cfg) {
    std::ostringstream out;
    out << "perplexity = " << format_real(cfg.perplexity) << '\n'
        << "alpha = " << format_real(cfg.alpha) << '\n'
        << "beta = " << format_real(cfg.beta) << '\n'
        << "n_clusters = " << cfg.n_clusters << '\n'
        << "pca_dims = " << cfg.pca_dims << '\n'
        << "pca_center = " << (cfg.pca_center ? "true" : "false") << '\n'
        << "out_dims = " << cfg.out_dims << '\n'
        << "n_neighbors = " << cfg.n_neighbors << '\n'
        << "learning_rate = " << format_real(cfg.learning_rate) << '\n'
        << "momentum_initial = " << format_real(cfg.momentum_initial) << '\n'
        << "momentum_final = " << format_real(cfg.momentum_final) << '\n'
        << "momentum_switch_iter = " << cfg.momentum_switch_iter << '\n'
        << "n_iter = " << cfg.n_iter << '\n'
        << "bh_theta = " << format_real(cfg.bh_theta) << '\n'
        << "gradient_mode = " << to_string(cfg.gradient_mode) << '\n'
        << "seed = " << cfg.seed << '\n'
        << "perplexity_tol = " << format_real(cfg.perplexity_tol) << '\n'
        << "perplexity_max_iter = " << cfg.perplexity_max_iter << '\n'
        << "init_stddev = " << format_real(cfg.init_stddev) << '\n'
        << "exaggeration = " << format_real(cfg.exaggeration) << '\n'
        << "exaggeration_iter = " << cfg.exaggeration_iter << '\n'
        << "kmeans_max_iter = " << cfg.kmeans_max_iter << '\n'
        << "log_every = " << cfg.log_every << '\n';
    return out.str();
}

void set_config_value(EmbedConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "perplexity") cfg.perplexity = parse_real(key, value);
    else if (key == "alpha") cfg.alpha = parse_real(key, value);
    else if (key == "beta") cfg.beta = parse_real(key, value);
    else if (key == "n_clusters") cfg.n_clusters = parse_int<int>(key, value);
    else if (key == "pca_dims") cfg.pca_dims = parse_int<int>(key, value);
    else if (key == "pca_center") cfg.pca_center = parse_bool(key, value);
    else if (key == "out_dims") cfg.out_dims = parse_int<int>(key, value);
    else if (key == "n_neighbors") cfg.n_neighbors = parse_int<int>(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_real(key, value);
    else if (key == "momentum_initial") cfg.momentum_initial = parse_real(key, value);
    else if (key == "momentum_final") cfg.momentum_final = parse_real(key, value);
    else if (key == "momentum_switch_iter") cfg.momentum_switch_iter = parse_int<int>(key, value);
    else if (key == "n_iter") cfg.n_iter = parse_int<int>(key, value);
    else if (key == "bh_theta") cfg.bh_theta = parse_real(key, value);
    else if (key == "gradient_mode") cfg.gradient_mode = parse_gradient_mode(value);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value);
    else if (key == "perplexity_tol") cfg.perplexity_tol = parse_real(key, value);
    else if (key == "perplexity_max_iter") cfg.perplexity_max_iter = parse_int<int>(key, value);
    else if (key == "init_stddev") cfg.init_stddev = parse_real(key, value);
    else if (key == "exaggeration") cfg.exaggeration = parse_real(key, value);
    else if (key == "exaggeration_iter") cfg.exaggeration_iter = parse_int<int>(key, value);
    else if (key == "kmeans_max_iter") cfg.kmeans_max_iter = parse_int<int>(key, value);
    else if (key == "log_every") cfg.log_every = parse_int<int>(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

EmbedConfig parse_config(const std::string& text, EmbedConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        try {
            set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

std::pair<Matrix, std::vector<double>> center_columns(const Matrix& x) {
    if (x.rows() < 1) {
        throw std::invalid_argument("cannot center a matrix with no rows");
    }
    const auto n = x.rows(), d = x.cols();
    std::vector<double> means(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(x(i, j))) {
                throw std::invalid_argument("non-finite entry at row " + std::to_string(i) + ", column " + std::to_string(j));
            }
            means[j] += x(i, j);
        }
    }
    for (auto& m : means) {
        m /= static_cast<double>(n);
    }

    Matrix centered = x;
    for (std::size_t i = 0; i < n; ++i) {
        auto row = centered.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] -= means[j];
        }
    }
    return {std::move(centered), std::move(means)};
}

} // namespace gtsne
