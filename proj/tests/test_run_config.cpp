#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rslab/run_config.hpp"

using namespace rslab;
using nlohmann::json;

TEST_CASE("defaults")
{
    auto const c = RunConfig::from_json(json::object());
    CHECK(c.format == "csv");
    CHECK(c.cutoff_mult == 12.0);
    CHECK(c.x_grid.size() == 6);
    CHECK(c.discriminants().empty());
    auto const t = c.truncation();
    CHECK(t.cutoff_mult == 12.0);
    CHECK(t.kernel.sigma == 0.0);
}

TEST_CASE("keys and values")
{
    auto const c = RunConfig::from_json(json{{"verb", "scan"},
                                             {"disc", "-4,-7"},
                                             {"disc-range", "-30:-20"},
                                             {"kernel-sigma", 3.0},
                                             {"cutoff-mult", 16},
                                             {"force", true},
                                             {"x-grid", "1,2.5"}});
    CHECK(c.verb == "scan");
    CHECK(c.force);
    CHECK(c.x_grid == std::vector<double>{1.0, 2.5});
    CHECK(c.discriminants() == std::vector<std::int64_t>{-4, -7, -20, -23, -24});
    CHECK(c.truncation().kernel.sigma == 3.0);
    auto const d = RunConfig::from_json(json{{"disc", json::array({-3, -4})}, {"disc-range", json::array({-8, -7})}});
    CHECK(d.discriminants() == std::vector<std::int64_t>{-3, -4, -7, -8});
    CHECK(RunConfig::from_json(json{{"disc", -23}}).disc == std::vector<std::int64_t>{-23});
}

TEST_CASE("rejections")
{
    CHECK_THROWS_AS(RunConfig::from_json(json{{"bogus", 1}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json::array()), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"format", "xml"}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"cutoff-mult", 0.5}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"kernel-sigma", 100.0}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"kernel-T", -1.0}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"disc-range", "5:10"}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"jobs", "many"}}), Error);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"x-grid", "1,-2"}}), Error);
    CHECK_THROWS_AS(parse_range("3"), Error);
    CHECK_THROWS_AS(parse_range("-3:-10"), Error);
    CHECK_THROWS_AS(parse_int_list("1,x"), Error);
    CHECK(parse_range("-10:-3") == std::pair<std::int64_t, std::int64_t>{-10, -3});
    CHECK(parse_int_list("-4, -3") == std::vector<std::int64_t>{-4, -3});
}
