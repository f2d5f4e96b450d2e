#include "fvlab/csv_writer.hpp"

#include <charconv>

#include "fvlab/errors.hpp"

namespace fvlab {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
    if (!out_) throw ConfigError("cannot open output file \"" + path + "\"");
    for (size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw ConfigError("csv row width mismatch in \"" + path_ + "\"");
    for (size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
        throw ConfigError("csv row width mismatch in \"" + path_ + "\"");
    for (size_t i = 0; i < fields.size(); ++i)
        out_ << (i ? "," : "") << fields[i];
    out_ << "\n";
}

}  // namespace fvlab
