#ifndef REMEST_SIM_CSV_HPP
#define REMEST_SIM_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "remest/errors.hpp"

namespace remest::sim {

/// CSV emitter with a versioned schema line. Output format:
///   # schema: remest.<name>.v1
///   col1,col2,...
///   ...rows...
/// Numeric cells are printed with %.10g, so identical inputs give
/// byte-identical files.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open CSV output: " + path);
        out_ << "# schema: " << schema << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out_ << (i ? "," : "") << columns[i];
        }
        out_ << "\n";
    }

    static std::string num(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return buf;
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

}  // namespace remest::sim

#endif  // REMEST_SIM_CSV_HPP
