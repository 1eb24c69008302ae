// CSV writing and reading for the experiment tables: numeric columns only,
// %.17g formatting so every double survives a round trip, no quoting.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotor {

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path), n_cols_(columns.size()) {
        if (!out_) throw std::invalid_argument("csv: cannot open " + path.string());
        if (columns.empty()) throw std::invalid_argument("csv: no columns");
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        if (values.size() != n_cols_) throw std::logic_error("csv: row width mismatch");
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            if (i > 0) out_ << ',';
            out_ << buf;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        row(std::span<const double>(values.begin(), values.size()));
    }

  private:
    std::ofstream out_;
    std::size_t n_cols_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::invalid_argument("csv: no column named " + name);
    }
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}
}  // namespace detail

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw std::invalid_argument("csv: missing header in " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();

    CsvTable table;
    table.columns = detail::split_csv_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != table.columns.size())
            throw std::invalid_argument("csv: " + path.string() + " line " +
                                        std::to_string(line_no) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(table.columns.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                std::size_t used = 0;
                row[i] = std::stod(fields[i], &used);
                if (used != fields[i].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw std::invalid_argument("csv: " + path.string() + " line " +
                                            std::to_string(line_no) + ": cannot parse '" +
                                            fields[i] + "' as a number");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace rotor
