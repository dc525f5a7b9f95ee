#include "extremo/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace extremo {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

SeriesTable load_series(const std::filesystem::path& path, const std::vector<std::string>& select) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("load_series: cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw EmptySeries("load_series: " + path.string() + " is empty");
    const std::vector<std::string> header = split_csv_line(line);

    std::vector<size_t> selected_idx;
    if (select.empty()) {
        for (size_t i = 0; i < header.size(); ++i) selected_idx.push_back(i);
    } else {
        for (const std::string& name : select) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end())
                throw ParseError("load_series: column '" + name + "' not in header", 0, name);
            selected_idx.push_back(static_cast<size_t>(it - header.begin()));
        }
    }

    SeriesTable table;
    long timestamp_idx = -1;
    if (!select.empty() &&
        std::find(selected_idx.begin(), selected_idx.end(), size_t{0}) == selected_idx.end() &&
        !header.empty()) {
        timestamp_idx = 0;
        table.timestamp_name = header[0];
    }
    for (size_t i : selected_idx) table.names.push_back(header[i]);
    table.columns.assign(selected_idx.size(), {});

    long row = 0;
    bool first_col_autodetect = select.empty();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const std::vector<std::string> cells = split_csv_line(line);

        // Without an explicit selection, a non-numeric leading column on the
        // first data row becomes the timestamp.
        if (first_col_autodetect && row == 1 && !cells.empty()) {
            double probe;
            if (!parse_double(cells[0], probe) && header.size() > 1) {
                timestamp_idx = 0;
                table.timestamp_name = header[0];
                table.names.erase(table.names.begin());
                table.columns.pop_back();
                selected_idx.erase(selected_idx.begin());
            }
            first_col_autodetect = false;
        }

        if (timestamp_idx >= 0)
            table.timestamps.push_back(
                static_cast<size_t>(timestamp_idx) < cells.size() ? cells[0] : "");
        for (size_t k = 0; k < selected_idx.size(); ++k) {
            const size_t idx = selected_idx[k];
            if (idx >= cells.size())
                throw ParseError("load_series: missing cell at data row " + std::to_string(row) +
                                     ", column '" + table.names[k] + "'",
                                 row, table.names[k]);
            double v;
            if (!parse_double(cells[idx], v))
                throw ParseError("load_series: non-numeric cell at data row " +
                                     std::to_string(row) + ", column '" + table.names[k] + "'",
                                 row, table.names[k]);
            table.columns[k].push_back(v);
        }
    }
    if (row == 0) throw EmptySeries("load_series: " + path.string() + " has no data rows");
    return table;
}

void write_csv(const std::filesystem::path& path, const SeriesTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());

    bool first = true;
    if (!table.timestamp_name.empty()) {
        out << table.timestamp_name;
        first = false;
    }
    for (const std::string& name : table.names) {
        if (!first) out << ',';
        out << name;
        first = false;
    }
    out << '\n';

    const size_t n = table.rows();
    for (size_t t = 0; t < n; ++t) {
        first = true;
        if (!table.timestamp_name.empty()) {
            out << (t < table.timestamps.size() ? table.timestamps[t] : "");
            first = false;
        }
        for (const auto& col : table.columns) {
            if (!first) out << ',';
            out << format_double(col[t]);
            first = false;
        }
        out << '\n';
    }
}

}  // namespace extremo
