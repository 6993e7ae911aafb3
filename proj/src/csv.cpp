#include "gtsne/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gtsne {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto first = field.find_first_not_of(" \t\"");
        const auto last = field.find_last_not_of(" \t\"");
        out.push_back(first == std::string::npos ? std::string{} : field.substr(first, last - first + 1));
        if (comma == std::string::npos) {
            return out;
        }
        start = comma + 1;
    }
}

bool parse_double(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

std::string where(const std::string& source, std::size_t line, std::size_t column) {
    return source + ": line " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

} // namespace

Dataset parse_csv(const std::string& text, bool has_header, const std::optional<std::string>& label_column,
                  const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> names;
    std::optional<std::size_t> label_index;
    std::size_t width = 0;
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t rows = 0;

    auto resolve_label = [&]() {
        if (!label_column) {
            return;
        }
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (names[c] == *label_column) {
                label_index = c;
                return;
            }
        }
        std::size_t index = 0;
        const auto& spec = *label_column;
        auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), index);
        if (ec != std::errc() || ptr != spec.data() + spec.size() || index >= width) {
            throw IoError(source + ": label column '" + spec + "' not found");
        }
        label_index = index;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        auto fields = split_fields(line);
        if (width == 0) {
            width = fields.size();
            if (has_header) {
                names = std::move(fields);
                resolve_label();
                continue;
            }
            resolve_label();
        }
        if (fields.size() != width) {
            throw IoError(source + ": line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < width; ++c) {
            double v = 0;
            if (!parse_double(fields[c], v) || !std::isfinite(v)) {
                throw IoError(where(source, lineno, c) + ": non-numeric cell '" + fields[c] + "'");
            }
            if (label_index && c == *label_index) {
                if (v != std::floor(v) || std::abs(v) > 2e9) {
                    throw IoError(where(source, lineno, c) + ": label '" + fields[c] + "' is not an integer");
                }
                labels.push_back(static_cast<int>(v));
            } else {
                values.push_back(v);
            }
        }
        ++rows;
    }

    if (rows == 0) {
        throw IoError(source + ": no data rows");
    }
    Dataset out;
    const std::size_t dims = width - (label_index ? 1 : 0);
    if (dims == 0) {
        throw IoError(source + ": no coordinate columns");
    }
    out.x = Matrix(rows, dims, std::move(values));
    if (label_index) {
        out.labels = std::move(labels);
    }
    out.name = source;
    return out;
}

Dataset read_csv(const std::string& path, bool has_header, const std::optional<std::string>& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), has_header, label_column, path);
}

std::string format_csv(const Matrix& values, const std::optional<std::vector<int>>& labels, int precision, bool header,
                       const std::string& prefix) {
    if (labels && labels->size() != values.rows()) {
        throw std::invalid_argument("label count does not match row count");
    }
    std::string out;
    if (header) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            out += (c ? "," : "") + prefix + std::to_string(c);
        }
        if (labels) {
            out += ",label";
        }
        out += '\n';
    }
    char buffer[64];
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            std::snprintf(buffer, sizeof(buffer), "%.*g", precision, values(i, c));
            if (c) {
                out += ',';
            }
            out += buffer;
        }
        if (labels) {
            out += ',' + std::to_string((*labels)[i]);
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

void write_csv(const Matrix& values, const std::optional<std::vector<int>>& labels, const std::string& path, int precision,
               bool header, const std::string& prefix) {
    write_text(path, format_csv(values, labels, precision, header, prefix));
}

void write_affinities_csv(const AffinityModel& p, const std::string& path) {
    std::string out = "i,j,p\n";
    char buffer[96];
    for (const auto& e : p.entries) {
        std::snprintf(buffer, sizeof(buffer), "%zu,%zu,%.17g\n", e.i, e.j, e.p);
        out += buffer;
    }
    write_text(path, out);
}

} // namespace gtsne
