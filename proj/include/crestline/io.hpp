#ifndef CRESTLINE_IO_HPP
#define CRESTLINE_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "crestline/errors.hpp"

namespace crestline {

/// Fixed numeric formatting for CSV output: 17 significant digits, enough
/// to round-trip any double, so identical runs are byte-identical.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated writer with a header row and LF line endings.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw error("cannot open " + path.string() + " for writing");
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << fmt17(values[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open " + path.string() + " for writing");
    out << text;
}

} // namespace crestline

#endif
