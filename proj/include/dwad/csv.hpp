#pragma once
// Minimal CSV I/O with the project's output contract: 17 significant digits
// for floating-point cells, atomic file replacement (write to a temporary in
// the same directory, then rename), and strict validation on read.

#include <string>
#include <vector>

#include "dwad/estimator.hpp"

namespace dwad {

// Round-trip-exact decimal rendering ("%.17g").
std::string format_g17(double value);

// RFC-4180-style quoting when a cell contains a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

// Writes content to path via a same-directory temporary plus rename, so
// readers never observe a partially written file.
void write_text_atomic(const std::string& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);  // must match header width
    std::string to_string() const;
    void write(const std::string& path) const;  // atomic
};

// Reads an observation file with header "y,x1,...,xd" (d inferred), one
// numeric row per observation.  Throws DataError with line context on a bad
// header, ragged rows, non-numeric or non-finite fields, or fewer than 3
// observations.
Sample read_sample_csv(const std::string& path);

}  // namespace dwad
