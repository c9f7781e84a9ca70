#include "dwad/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dwad/errors.hpp"

namespace dwad {

namespace {

std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& raw, const std::string& context) {
    const std::string s = trim_copy(raw);
    if (s.empty()) throw DataError(context + ": empty numeric field");
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw DataError(context + ": cannot parse '" + s + "' as a number");
    if (!std::isfinite(value)) throw DataError(context + ": non-finite value '" + s + "'");
    return value;
}

}  // namespace

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    const fs::path tmp = dir / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw DataError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw DataError("cannot rename '" + tmp.string() + "' to '" + target.string() +
                        "': " + ec.message());
    }
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw ConfigError("CsvTable: row width " + std::to_string(row.size()) +
                          " does not match header width " + std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += csv_escape(header[j]);
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += csv_escape(row[j]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const { write_text_atomic(path, to_string()); }

Sample read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + path + "': empty file");
    std::vector<std::string> head = split_line(line);
    for (auto& cell : head) cell = trim_copy(cell);
    if (head.empty() || head[0] != "y")
        throw DataError("'" + path + "': first header column must be 'y'");
    const int dim = static_cast<int>(head.size()) - 1;
    if (dim < 1) throw DataError("'" + path + "': expected at least one covariate column 'x1'");
    for (int j = 1; j <= dim; ++j)
        if (head[static_cast<std::size_t>(j)] != "x" + std::to_string(j))
            throw DataError("'" + path + "': header column " + std::to_string(j + 1) +
                            " must be 'x" + std::to_string(j) + "', got '" +
                            head[static_cast<std::size_t>(j)] + "'");

    std::vector<double> ys;
    std::vector<double> xs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_copy(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        const std::string context = "'" + path + "' line " + std::to_string(lineno);
        if (static_cast<int>(cells.size()) != dim + 1)
            throw DataError(context + ": expected " + std::to_string(dim + 1) +
                            " fields, got " + std::to_string(cells.size()));
        ys.push_back(parse_number(cells[0], context));
        for (int j = 1; j <= dim; ++j)
            xs.push_back(parse_number(cells[static_cast<std::size_t>(j)], context));
    }
    const int n = static_cast<int>(ys.size());
    if (n < 3) throw DataError("'" + path + "': need at least 3 observations, got " +
                               std::to_string(n));

    Sample sample;
    sample.y.resize(n);
    sample.x.resize(n, dim);
    for (int i = 0; i < n; ++i) {
        sample.y[i] = ys[static_cast<std::size_t>(i)];
        for (int j = 0; j < dim; ++j)
            sample.x(i, j) = xs[static_cast<std::size_t>(i) * dim + static_cast<std::size_t>(j)];
    }
    return sample;
}

}  // namespace dwad
