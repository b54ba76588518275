#pragma once

#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <string>
#include <vector>

#include "fwc/errors.hpp"

namespace fwc::io {

/// CSV emitter: one '#' header line of column names, then numeric rows at
/// full double precision (17 significant digits), deterministic on a platform.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : path_(path), n_cols_(columns.size()) {
        if (columns.empty()) throw ConfigError("CsvWriter: no columns given");
        out_.open(path);
        if (!out_) throw ConfigError("CsvWriter: cannot open '" + path + "' for writing");
        out_ << "# ";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
        out_ << std::setprecision(17);
    }

    void row(const std::vector<double>& values) {
        if (values.size() != n_cols_)
            throw ConfigError("CsvWriter: row width " + std::to_string(values.size()) +
                              " does not match " + std::to_string(n_cols_) + " columns");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

    void close() {
        out_.flush();
        if (!out_) throw ConfigError("CsvWriter: write to '" + path_ + "' failed");
        out_.close();
    }

private:
    std::string path_;
    std::size_t n_cols_ = 0;
    std::ofstream out_;
};

}  // namespace fwc::io
