#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"

namespace qsig {

struct ColumnRoles {
    std::string y_col;
    std::vector<std::string> x_cols;
    std::vector<std::string> z_cols;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace / CR
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_cell(const std::string& cell, int row, const std::string& col) {
    if (cell.empty())
        throw data_error("empty cell at row " + std::to_string(row) + ", column " + col);
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw data_error("unparseable cell '" + cell + "' at row " + std::to_string(row) +
                         ", column " + col);
    }
}

}  // namespace detail

/// Load a header-first CSV file into a Dataset under the given column roles.
/// Emits a warning string (sample-too-small) via `warning` when n < 20.
inline Dataset load_csv(const std::string& path, const ColumnRoles& roles,
                        std::string* warning = nullptr) {
    if (roles.y_col.empty() || roles.x_cols.empty() || roles.z_cols.empty())
        throw config_error("column roles for y, x and z must all be given");

    std::ifstream in(path);
    if (!in) throw config_error("cannot open input file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw data_error("empty file: " + path);
    auto header = detail::split_csv_line(line);

    auto find_col = [&](const std::string& name) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return static_cast<int>(c);
        throw config_error("column '" + name + "' not found in header of " + path);
    };

    int yc = find_col(roles.y_col);
    std::vector<int> xc, zc;
    for (const auto& c : roles.x_cols) xc.push_back(find_col(c));
    for (const auto& c : roles.z_cols) zc.push_back(find_col(c));

    // disjointness
    std::vector<int> all{yc};
    all.insert(all.end(), xc.begin(), xc.end());
    all.insert(all.end(), zc.begin(), zc.end());
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (all[i] == all[j]) throw config_error("y/x/z column roles must be disjoint");

    Dataset data;
    data.d = static_cast<int>(xc.size());
    data.q = static_cast<int>(zc.size());

    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw data_error("row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        data.y.push_back(detail::parse_cell(cells[yc], row, roles.y_col));
        for (std::size_t j = 0; j < xc.size(); ++j)
            data.x.push_back(detail::parse_cell(cells[xc[j]], row, roles.x_cols[j]));
        for (std::size_t j = 0; j < zc.size(); ++j)
            data.z.push_back(detail::parse_cell(cells[zc[j]], row, roles.z_cols[j]));
        ++data.n;
    }

    if (data.n < 20 && warning)
        *warning = "sample is small (n = " + std::to_string(data.n) + " < 20); results may be unreliable";
    data.validate();
    return data;
}

}  // namespace qsig
