#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "extremo/common.hpp"

namespace extremo {

/// Numeric columns plus an optional timestamp column that is carried through
/// to outputs but ignored for computation.
struct SeriesTable {
    std::vector<std::string> names;            // numeric column names
    std::vector<std::vector<double>> columns;  // one vector per name
    std::string timestamp_name;                // empty when absent
    std::vector<std::string> timestamps;

    size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

/// Loads selected columns from a header-row CSV. `select` holds column names;
/// when empty, every column is selected (a leading non-numeric column is
/// treated as the timestamp). When a selection is given and the file's first
/// column is not selected, that column is preserved as the timestamp.
/// Throws FileNotFound, EmptySeries, or ParseError naming the 1-based data
/// row and column of the offending cell.
SeriesTable load_series(const std::filesystem::path& path,
                        const std::vector<std::string>& select = {});

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

/// Writes a CSV with header; numbers use shortest round-trip formatting, so
/// a write/load cycle is lossless.
void write_csv(const std::filesystem::path& path, const SeriesTable& table);

}  // namespace extremo
