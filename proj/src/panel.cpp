#include "facnum/panel.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace facnum {

Panel make_panel(Eigen::MatrixXd data) {
    if (data.rows() < 1) throw std::domain_error("Panel: needs at least one series");
    if (data.cols() < 3)
        throw std::domain_error("Panel: needs n_obs >= 3 (at least two lag-1 products)");
    if (!data.allFinite()) throw std::domain_error("Panel: non-finite entries rejected");
    return Panel{std::move(data)};
}

void demean_rows(Panel& panel) {
    panel.data.colwise() -= panel.data.rowwise().mean();
}

Eigen::MatrixXd lag1_autocov(const Panel& panel) {
    const Eigen::Index T = panel.t_len();
    if (T < 2) throw std::domain_error("lag1_autocov: insufficient data (n_obs < 3)");
    const auto& y = panel.data;
    return y.rightCols(T) * y.leftCols(T).transpose() / static_cast<double>(T);
}

namespace {

bool parse_cell(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

Panel read_panel_csv(const std::string& path, bool transpose, bool demean) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open panel file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        std::vector<double> row(cells.size());
        bool ok = true;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (!parse_cell(cells[i], row[i])) {
                ok = false;
                break;
            }
        if (!ok) {
            if (first_data_line) {  // header row
                first_data_line = false;
                continue;
            }
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": non-numeric cell in CSV panel");
        }
        first_data_line = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": ragged row (expected " +
                                     std::to_string(rows.front().size()) + " cells)");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty panel file");

    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows.front().size());
    // Default layout: rows are time points, columns are series.
    Eigen::MatrixXd data(transpose ? r : c, transpose ? c : r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) {
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (transpose)
                data(i, j) = v;
            else
                data(j, i) = v;
        }
    Panel panel = make_panel(std::move(data));
    if (demean) demean_rows(panel);
    return panel;
}

void write_panel_csv(const Panel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write panel file: " + path);
    char buf[40];
    for (Eigen::Index t = 0; t < panel.n_obs(); ++t) {
        for (Eigen::Index i = 0; i < panel.p(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", panel.data(i, t));
            if (i) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace facnum
