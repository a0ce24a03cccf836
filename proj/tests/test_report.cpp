// Apache License, Version 2.0, refer to LICENSE.txt
#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "hiercpt/report.hpp"
#include "test_util.hpp"

using namespace hiercpt;

TEST_CASE("emit_report refuses empty results") {
    Table table;
    table.columns = {"a", "b"};
    std::ostringstream out;
    REQUIRE_THROWS_AS(emit_report(table, ReportFormat::csv, out), data_error);
    REQUIRE_THROWS_AS(emit_report_file(table, ReportFormat::csv, "/tmp/should_not_exist.csv"),
                      data_error);
}

TEST_CASE("single-row table renders header plus one row") {
    Table table;
    table.columns = {"name", "count", "value"};
    table.add_row({std::string("x"), 3LL, 0.5});
    std::ostringstream out;
    emit_report(table, ReportFormat::csv, out);
    REQUIRE(out.str() == "name,count,value\nx,3,0.5\n");
}

TEST_CASE("csv floats survive a parse-back round trip") {
    Table table;
    table.columns = {"v"};
    std::vector<double> values{1.0 / 3.0, 2.0 / 7.0, 1e-17, 123456.789012345678,
                               -0.000123456789012345};
    for (double v : values) table.add_row({v});
    std::ostringstream out;
    emit_report(table, ReportFormat::csv, out);

    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    for (double expected : values) {
        std::getline(in, line);
        REQUIRE(std::stod(line) == expected);
    }
}

TEST_CASE("json output mirrors the csv schema") {
    Table table;
    table.columns = {"tag", "n"};
    table.add_row({std::string("alpha \"x\""), 2LL});
    std::ostringstream out;
    emit_report(table, ReportFormat::json, out);
    REQUIRE(out.str() == "[\n  {\"tag\": \"alpha \\\"x\\\"\", \"n\": 2}\n]\n");
}

TEST_CASE("emit is deterministic") {
    Table table;
    table.columns = {"a"};
    table.add_row({0.1234567890123456789});
    std::ostringstream o1, o2;
    emit_report(table, ReportFormat::csv, o1);
    emit_report(table, ReportFormat::csv, o2);
    REQUIRE(o1.str() == o2.str());
}
