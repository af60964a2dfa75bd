#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "fisvdd/errors.hpp"
#include "fisvdd/kernel.hpp"

namespace fisvdd {

// Parsed numeric CSV. When `labeled` parsing was requested, the last column
// is split off into `labels` (0 = normal, 1 = outlier) and `dimension`
// counts features only.
struct CsvData {
    std::vector<DataPoint> rows;
    std::vector<int> labels;
    std::size_t dimension = 0;
    bool had_header = false;
};

namespace csv_detail {

inline std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

inline bool parse_cell(const std::string& cell, double& out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) {
        return false;
    }
    while (*end == ' ' || *end == '\t') {
        ++end;
    }
    return *end == '\0';
}

}  // namespace csv_detail

// Comma-separated, purely numeric rows with a constant column count. An
// optional header is detected by a non-numeric first row. Quoted cells are
// not supported and rejected.
inline CsvData read_csv(std::istream& in, bool labeled) {
    CsvData data;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_row = true;
    std::size_t columns = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        const auto cells = csv_detail::split_cells(line);

        if (first_content_row) {
            // Header heuristic: a first row with any non-numeric cell is a
            // header and is skipped, quoted or not.
            bool numeric = true;
            for (const auto& cell : cells) {
                double ignored;
                if (!csv_detail::parse_cell(cell, ignored)) {
                    numeric = false;
                    break;
                }
            }
            first_content_row = false;
            if (!numeric) {
                data.had_header = true;
                continue;
            }
        }

        if (line.find('"') != std::string::npos) {
            throw ParseError("quoted CSV cells are not supported", line_no);
        }
        if (columns == 0) {
            columns = cells.size();
            if (labeled && columns < 2) {
                throw ParseError("labeled CSV needs at least one feature column and a label column",
                                 line_no);
            }
        } else if (cells.size() != columns) {
            throw ParseError("row has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(columns),
                             line_no);
        }

        const std::size_t feature_count = labeled ? columns - 1 : columns;
        DataPoint row;
        row.reserve(feature_count);
        for (std::size_t i = 0; i < feature_count; ++i) {
            double value;
            if (!csv_detail::parse_cell(cells[i], value)) {
                throw ParseError("cell '" + cells[i] + "' is not a number", line_no);
            }
            if (!std::isfinite(value)) {
                throw ParseError("cell '" + cells[i] + "' is not finite", line_no);
            }
            row.push_back(value);
        }
        if (labeled) {
            double value;
            if (!csv_detail::parse_cell(cells[columns - 1], value) ||
                (value != 0.0 && value != 1.0)) {
                throw ParseError("label cell '" + cells[columns - 1] +
                                     "' must be 0 or 1",
                                 line_no);
            }
            data.labels.push_back(static_cast<int>(value));
        }
        data.rows.push_back(std::move(row));
    }

    data.dimension = labeled ? (columns > 0 ? columns - 1 : 0) : columns;
    return data;
}

inline CsvData read_csv_file(const std::string& path, bool labeled) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_csv(in, labeled);
}

}  // namespace fisvdd
