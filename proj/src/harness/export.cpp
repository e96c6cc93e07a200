#include "combrs/harness/export.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace combrs::harness {

namespace {

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("csv: malformed number '" + s + "'");
    return v;
}

}  // namespace

std::string format_csv(const LabeledMatrix& m) {
    std::string out;
    for (double f : m.col_axis) {
        out += ',';
        out += fmt9(f);
    }
    out += '\n';
    for (std::size_t r = 0; r < m.values.rows(); ++r) {
        out += fmt9(m.row_axis[r]);
        for (std::size_t c = 0; c < m.values.cols(); ++c) {
            out += ',';
            out += fmt9(m.values(r, c));
        }
        out += '\n';
    }
    return out;
}

LabeledMatrix parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    LabeledMatrix m;
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
    auto head = split(line, ',');
    if (head.empty() || !head[0].empty()) throw std::invalid_argument("csv: first cell must be empty");
    for (std::size_t i = 1; i < head.size(); ++i) m.col_axis.push_back(parse_double(head[i]));

    std::vector<double> body;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != m.col_axis.size() + 1) throw std::invalid_argument("csv: ragged row");
        m.row_axis.push_back(parse_double(cells[0]));
        for (std::size_t i = 1; i < cells.size(); ++i) body.push_back(parse_double(cells[i]));
    }
    m.values = Matrix<double>(m.row_axis.size(), m.col_axis.size());
    m.values.data() = std::move(body);
    return m;
}

std::string format_pgm(const Matrix<double>& values, bool power) {
    const double vmax = values.empty() ? 0.0 : *std::max_element(values.data().begin(), values.data().end());
    const double scale = power ? 10.0 : 20.0;
    std::string out = "P2\n" + std::to_string(values.cols()) + " " + std::to_string(values.rows()) + "\n255\n";
    std::size_t line_len = 0;
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            const double v = values(r, c);
            double db = -60.0;
            if (vmax > 0.0 && v > 0.0) db = std::clamp(scale * std::log10(v / vmax), -60.0, 0.0);
            const int level = static_cast<int>(std::lround((db + 60.0) / 60.0 * 255.0));
            const std::string tok = std::to_string(level);
            // Keep lines under the 70-character limit of the format.
            if (line_len > 0 && line_len + 1 + tok.size() > 70) {
                out += '\n';
                line_len = 0;
            }
            if (line_len > 0) {
                out += ' ';
                ++line_len;
            }
            out += tok;
            line_len += tok.size();
        }
        out += '\n';
        line_len = 0;
    }
    return out;
}

std::string format_matrix_json(const LabeledMatrix& m, const std::string& quantity) {
    nlohmann::json j;
    j["quantity"] = quantity;
    j["rows"] = m.values.rows();
    j["cols"] = m.values.cols();
    j["tau_axis_sec"] = m.row_axis;
    j["fd_axis_hz"] = m.col_axis;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.values.rows(); ++r) {
        auto row = m.values.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["values"] = rows;
    return j.dump() + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

}  // namespace combrs::harness
