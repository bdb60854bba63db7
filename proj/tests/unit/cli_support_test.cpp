#include "chainform/config.hpp"
#include "chainform/output.hpp"
#include "chainform/svg.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chainform;

TEST_SUITE("config")
{
    TEST_CASE("empty file gives the benchmark calibration")
    {
        std::istringstream in("");
        auto c = resolve_config(parse_key_values(in, "empty"), {});
        auto d = default_calibration();
        CHECK(c.cal.params.delta == d.params.delta);
        CHECK(c.cal.params.lambda == d.params.lambda);
        CHECK(c.cal.params.psi == d.params.psi);
        CHECK(c.cal.params.n_inputs == d.params.n_inputs);
        CHECK(c.nodes == 200);
    }

    TEST_CASE("flags override the file, comments and sections parse")
    {
        std::istringstream in("# benchmark\nmodel.delta = 0.10\nlambda=18 # bare key\nN=4\n");
        auto file = parse_key_values(in, "f");
        auto c = resolve_config(file, parse_assignment("delta=0.02"));
        CHECK(c.cal.params.delta == 0.02);
        CHECK(c.cal.params.lambda == 18.0);
        CHECK(c.cal.params.n_inputs == 4);
    }

    TEST_CASE("invalid input is rejected")
    {
        CHECK_THROWS_AS(resolve_config({}, parse_assignment("delta=1.5")), ValidationError);
        CHECK_THROWS_AS(resolve_config({}, parse_assignment("model.gamma=1")), ValidationError);
        CHECK_THROWS_AS(resolve_config({}, parse_assignment("lambda=fast")), ValidationError);
        CHECK_THROWS_AS(resolve_config({}, parse_assignment("grid.nodes=2.5")), ValidationError);
        std::istringstream bad("delta 0.1\n");
        CHECK_THROWS_AS(parse_key_values(bad, "bad"), ValidationError);
    }

    TEST_CASE("resilience preset selects the link model")
    {
        auto c = resolve_config({}, parse_assignment("run.calibration=resilience"));
        CHECK(c.cal.params.delta == 0.02);
        CHECK(c.model == "links");
    }

    TEST_CASE("resolved keys round-trip")
    {
        auto c = resolve_config({}, parse_assignment("lambda=17.25"));
        auto again = resolve_config(resolved_keys(c), {});
        CHECK(resolved_keys(again) == resolved_keys(c));
        CHECK(again.cal.params.lambda == 17.25);
    }
}

TEST_SUITE("output")
{
    TEST_CASE("schemas")
    {
        CHECK(node_columns().size() == 8);
        const auto& a = aggregate_columns();
        CHECK(std::find(a.begin(), a.end(), "chi1") != a.end());
        CHECK(std::find(a.begin(), a.end(), "chi2") != a.end());
    }

    TEST_CASE("csv rendering and width check")
    {
        Table t{{"param", "value"}, {}};
        t.add({1.0, 0.1});
        CHECK(t.csv() == "param,value\n1,0.10000000000000001\n");
        CHECK_THROWS_AS(t.add({1.0}), ValidationError);
    }

    TEST_CASE("atomic write leaves no temp file")
    {
        auto dir = std::filesystem::temp_directory_path() / "chainform_unit";
        std::filesystem::create_directories(dir);
        auto p = dir / "x.csv";
        write_atomic(p, "a\n1\n");
        write_atomic(p, "a\n2\n");
        std::ifstream in(p);
        std::string s((std::istreambuf_iterator<char>(in)), {});
        CHECK(s == "a\n2\n");
        CHECK_FALSE(std::filesystem::exists(dir / "x.csv.tmp"));
        std::filesystem::remove_all(dir);
    }
}

TEST_SUITE("svg")
{
    TEST_CASE("charts are deterministic and escaped")
    {
        svg::Chart c;
        c.title = "a < b";
        c.series.push_back({"s", {0, 1, 2}, {1, 4, 9}});
        auto a = svg::render(c);
        CHECK(a == svg::render(c));
        CHECK(a.rfind("<svg", 0) == 0);
        CHECK(a.find("a &lt; b") != std::string::npos);
        CHECK(a.find("</svg>") != std::string::npos);
    }

    TEST_CASE("histogram")
    {
        svg::Histogram h;
        h.edges = {0, 1, 2};
        h.counts = {3, 5};
        auto s = svg::render(h);
        CHECK(s.find("<rect") != std::string::npos);
    }
}
