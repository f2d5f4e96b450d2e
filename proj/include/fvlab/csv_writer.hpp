#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fvlab {

// Shortest decimal representation that round-trips the double exactly;
// keeps CSV outputs byte-stable across runs and diff-friendly across
// implementations.
std::string format_double(double x);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& fields);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    size_t columns_;
};

}  // namespace fvlab
