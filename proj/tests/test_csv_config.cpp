#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dwad/cli_config.hpp"
#include "dwad/csv.hpp"
#include "dwad/errors.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("dwad_csv_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("g17 formatting round-trips exactly through strtod") {
    for (double v : {3.141592653589793, 0.1, 1e-300, -0.0, 12345.678901234567,
                     -2.2250738585072014e-308, 1.7976931348623157e308}) {
        const std::string s = dwad::format_g17(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
    }
    CHECK(dwad::format_g17(-0.0) == "-0");
    CHECK(dwad::format_g17(2.0) == "2");
}

TEST_CASE("csv escaping quotes only when needed") {
    CHECK(dwad::csv_escape("plain") == "plain");
    CHECK(dwad::csv_escape("a,b") == "\"a,b\"");
    CHECK(dwad::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(dwad::csv_escape("two\nlines") == "\"two\nlines\"");
    CHECK(dwad::csv_escape("") == "");
}

TEST_CASE("table rows must match the header width") {
    dwad::CsvTable t;
    t.header = {"a", "b"};
    t.add_row({"1", "2"});
    CHECK_THROWS_AS(t.add_row({"1"}), dwad::ConfigError);
    CHECK_THROWS_AS(t.add_row({"1", "2", "3"}), dwad::ConfigError);
    CHECK(t.to_string() == "a,b\n1,2\n");
}

TEST_CASE("atomic write replaces files without leftovers") {
    TempDir tmp;
    const std::string path = tmp.file("out.csv");
    dwad::write_text_atomic(path, "first\n");
    dwad::write_text_atomic(path, "second\n");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "second");
    // No temporary droppings next to the target.
    int entries = 0;
    for (const auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);
    CHECK_THROWS_AS(dwad::write_text_atomic(tmp.file("no_dir/x.csv"), "x"), dwad::DataError);
}

TEST_CASE("sample csv round trip preserves every bit") {
    TempDir tmp;
    dwad::CsvTable t;
    t.header = {"y", "x1", "x2"};
    t.add_row({dwad::format_g17(0.1), dwad::format_g17(-1.5), dwad::format_g17(2.25)});
    t.add_row({dwad::format_g17(3.141592653589793), dwad::format_g17(1e-12),
               dwad::format_g17(-7.0)});
    t.add_row({dwad::format_g17(-2.0), dwad::format_g17(0.3), dwad::format_g17(0.4)});
    const std::string path = tmp.file("sample.csv");
    t.write(path);

    const dwad::Sample s = dwad::read_sample_csv(path);
    REQUIRE(s.n() == 3);
    REQUIRE(s.dim() == 2);
    CHECK(s.y[0] == 0.1);
    CHECK(s.y[1] == 3.141592653589793);
    CHECK(s.x(0, 0) == -1.5);
    CHECK(s.x(1, 1) == -7.0);
    CHECK(s.x(2, 1) == 0.4);
}

TEST_CASE("sample csv error taxonomy") {
    TempDir tmp;
    auto expect_data_error = [&](const std::string& name, const std::string& content) {
        const std::string path = tmp.file(name);
        write_file(path, content);
        CHECK_THROWS_AS(dwad::read_sample_csv(path), dwad::DataError);
    };
    expect_data_error("bad_header.csv", "foo,x1\n1,2\n3,4\n5,6\n");
    expect_data_error("bad_xname.csv", "y,z1\n1,2\n3,4\n5,6\n");
    expect_data_error("gap_in_xs.csv", "y,x1,x3\n1,2,3\n4,5,6\n7,8,9\n");
    expect_data_error("ragged.csv", "y,x1\n1,2\n3\n5,6\n");
    expect_data_error("non_numeric.csv", "y,x1\n1,2\nfoo,4\n5,6\n");
    expect_data_error("trailing_junk.csv", "y,x1\n1,2\n3 junk,4\n5,6\n");
    expect_data_error("non_finite.csv", "y,x1\n1,2\ninf,4\n5,6\n");
    expect_data_error("nan_field.csv", "y,x1\n1,2\nnan,4\n5,6\n");
    expect_data_error("too_few_rows.csv", "y,x1\n1,2\n3,4\n");
    expect_data_error("empty.csv", "");
    CHECK_THROWS_AS(dwad::read_sample_csv(tmp.file("missing.csv")), dwad::DataError);
}

TEST_CASE("key=value parser semantics") {
    std::istringstream in(
        "# full-line comment\n"
        "\n"
        "  n = 500  \n"
        "name = linear # trailing comment\n"
        "eq = a=b=c\n"
        "n = 600\n");
    const auto kv = dwad::parse_key_value_config(in);
    CHECK(kv.size() == 3);
    CHECK(kv.at("n") == "600");            // later assignment wins
    CHECK(kv.at("name") == "linear");      // comment stripped, value trimmed
    CHECK(kv.at("eq") == "a=b=c");         // split at the first '='

    std::istringstream bad1("just some words\n");
    CHECK_THROWS_AS(dwad::parse_key_value_config(bad1), dwad::ConfigError);
    std::istringstream bad2("= value\n");
    CHECK_THROWS_AS(dwad::parse_key_value_config(bad2), dwad::ConfigError);
    CHECK_THROWS_AS(dwad::load_key_value_config("/no/such/config/file"), dwad::ConfigError);
}

TEST_CASE("comma list splitting") {
    const auto a = dwad::split_list("0.05, 0.1 ,0.01");
    REQUIRE(a.size() == 3);
    CHECK(a[0] == "0.05");
    CHECK(a[1] == "0.1");
    CHECK(a[2] == "0.01");
    CHECK(dwad::split_list("").empty());
    CHECK(dwad::split_list(" , ,").empty());
    const auto b = dwad::split_list("one");
    REQUIRE(b.size() == 1);
    CHECK(b[0] == "one");
}
