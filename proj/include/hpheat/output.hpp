#ifndef HPHEAT_OUTPUT_HPP
#define HPHEAT_OUTPUT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hpheat/config.hpp"
#include "hpheat/errors.hpp"

namespace hpheat {

/// Column table written either as whitespace .dat with a header line (readable
/// by pgfplots' \addplot table) or as CSV. Reals use 17 significant digits.
struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Optional text column in front of the numeric ones; its header is columns[0].
    std::vector<std::string> labels;

    void add_row(std::vector<double> r) { rows.push_back(std::move(r)); }

    std::string render(OutputFormat fmt) const {
        const char* sep = fmt == OutputFormat::Csv ? "," : " ";
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? sep : "") + columns[c];
        out += '\n';
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::string line;
            if (!labels.empty()) line = labels.at(r);
            for (double v : rows[r]) {
                if (!line.empty()) line += sep;
                line += format(v);
            }
            out += line + '\n';
        }
        return out;
    }

    void write(const std::filesystem::path& path, OutputFormat fmt) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open " + path.string() + " for writing");
        f << render(fmt);
        if (!f.flush()) throw IoError("write to " + path.string() + " failed");
    }

    static std::string format(double v) {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
};

} // namespace hpheat

#endif // HPHEAT_OUTPUT_HPP
