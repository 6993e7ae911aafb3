#ifndef GTSNE_IO_HPP
#define GTSNE_IO_HPP

#include "gtsne/affinity.hpp"
#include "gtsne/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gtsne {

/// Thrown for malformed or unreadable input files; the message carries the location.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Read a numeric CSV. With `has_header`, the first line names the columns.
 * `label_column` selects the label column by header name or by zero-based index;
 * every other column becomes a coordinate. Parsing is locale-independent.
 */
Dataset read_csv(const std::string& path, bool has_header = true, const std::optional<std::string>& label_column = std::nullopt);

/// Same as `read_csv` on in-memory text; `source` names the input in error messages.
Dataset parse_csv(const std::string& text, bool has_header, const std::optional<std::string>& label_column,
                  const std::string& source = "<memory>");

/**
 * Write one row per point with `%.{precision}g` formatting and `\n` endings.
 * The header names coordinates `<prefix>0, <prefix>1, ...` followed by `label`
 * when labels are given.
 */
void write_csv(const Matrix& values, const std::optional<std::vector<int>>& labels, const std::string& path,
               int precision = 17, bool header = true, const std::string& prefix = "x");

std::string format_csv(const Matrix& values, const std::optional<std::vector<int>>& labels, int precision = 17,
                       bool header = true, const std::string& prefix = "x");

inline void write_csv(const Dataset& data, const std::string& path, int precision = 17) {
    write_csv(data.x, data.labels, path, precision, true, "x");
}

/// `i,j,p` rows for every stored pair (i < j).
void write_affinities_csv(const AffinityModel& p, const std::string& path);

struct PlotSpec {
    int width = 800;
    int height = 800;
    double point_radius = 3;
    double margin = 0.05;
    std::vector<std::string> palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
};

/**
 * Scatter plot of the first two columns as an SVG 1.1 document. Points are mapped
 * into the margin-inset viewport with equal x/y scale, centered; one `<circle>`
 * per point in row order, colored by label.
 */
std::string render_svg(const Matrix& y, const std::optional<std::vector<int>>& labels, const PlotSpec& spec = {});

void render_svg(const Matrix& y, const std::optional<std::vector<int>>& labels, const PlotSpec& spec, const std::string& path);

/// Write `text` to `path`, throwing `IoError` naming the path on failure.
void write_text(const std::string& path, const std::string& text);

} // namespace gtsne

#endif
