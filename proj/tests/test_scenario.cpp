#include <doctest.h>

#include "gluecd/scenario.hpp"

using namespace gluecd;

namespace {

std::string strip_timing(const RunReport& rep) { return rep.text(false); }

}  // namespace

TEST_CASE("all builtins validate against the schema") {
    CHECK(builtin_scenarios().size() == 8);
    for (const BuiltinEntry& e : builtin_scenarios()) {
        const Json j = Json::parse(e.text);
        CHECK_NOTHROW(parse_scenario(j));
        CHECK(parse_scenario(j).name == e.name);
    }
}

TEST_CASE("unknown keys are rejected with the offending names") {
    Json j = Json::parse(builtin_scenario_text("1d-affine-fail"));
    j["bogus_key"] = 1;
    try {
        parse_scenario(j);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }

    Json j2 = Json::parse(builtin_scenario_text("sin-weight-interval"));
    j2["space"]["extra"] = "x";
    CHECK_THROWS_AS(parse_scenario(j2), ValidationError);

    Json j3 = Json::parse(builtin_scenario_text("sin-weight-interval"));
    j3["tasks"][0]["mystery"] = 3;
    CHECK_THROWS_AS(run_scenario_json(j3), ValidationError);
}

TEST_CASE("schema validation catches malformed pieces") {
    // missing tasks
    Json j = Json::parse(R"({"name": "x", "space": {"type": "interval",
        "domain": [0, 1], "density": "1", "K": 0, "N": 2}})");
    CHECK_THROWS_AS(parse_scenario(j), ValidationError);
    // bad expression inside a side definition
    Json j2 = Json::parse(builtin_scenario_text("disk-doubling"));
    j2["space"]["side0"]["weight"] = "x1 +* 2";
    CHECK_THROWS_AS(parse_scenario(j2), ParseError);
    // wrong metric component count
    Json j3 = Json::parse(builtin_scenario_text("disk-doubling"));
    j3["space"]["side0"]["metric"] = {"1", "0"};
    CHECK_THROWS_AS(parse_scenario(j3), ValidationError);
}

TEST_CASE("1d builtins run with the expected verdicts") {
    {
        const RunReport rep = run_scenario_json(Json::parse(builtin_scenario_text("1d-sin-doubling")));
        CHECK(rep.all_pass);
        CHECK(rep.exit_code == 0);
        REQUIRE(rep.tasks.size() == 3);
        for (const TaskResult& t : rep.tasks) CHECK(t.pass);
    }
    {
        const RunReport rep = run_scenario_json(Json::parse(builtin_scenario_text("1d-affine-fail")));
        CHECK_FALSE(rep.all_pass);
        CHECK(rep.exit_code == 1);
        CHECK_FALSE(rep.tasks[0].pass);  // glue-1d kink fails
        CHECK_FALSE(rep.tasks[1].pass);  // wasserstein scan finds a violating pair
    }
    {
        const RunReport rep =
            run_scenario_json(Json::parse(builtin_scenario_text("sin-weight-interval")));
        CHECK(rep.all_pass);
        CHECK(rep.exit_code == 0);
    }
    {
        const RunReport rep = run_scenario_json(Json::parse(builtin_scenario_text("warped-sphere")));
        CHECK(rep.all_pass);
        CHECK(rep.exit_code == 0);
    }
}

TEST_CASE("annulus-doubling fails compatibility and the needle jump") {
    const RunReport rep = run_scenario_json(Json::parse(builtin_scenario_text("annulus-doubling")));
    CHECK_FALSE(rep.all_pass);
    CHECK(rep.exit_code == 1);
    REQUIRE(rep.tasks.size() == 2);
    CHECK_FALSE(rep.tasks[0].pass);
    CHECK_FALSE(rep.tasks[1].pass);
    // the compatibility report carries lambda_min(Pi) = -2
    bool found = false;
    for (const auto& [k, v] : rep.tasks[0].fields)
        if (k == "min_pi_eig") {
            CHECK(std::stod(v) == doctest::Approx(-2.0).epsilon(1e-8));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("weighted-disk builtin passes") {
    const RunReport rep = run_scenario_json(Json::parse(builtin_scenario_text("weighted-disk")));
    CHECK(rep.all_pass);
}

TEST_CASE("reports are deterministic and the scenario echo reruns identically") {
    const Json j = Json::parse(builtin_scenario_text("1d-sin-doubling"));
    const RunReport a = run_scenario_json(j);
    const RunReport b = run_scenario_json(j);
    CHECK(strip_timing(a) == strip_timing(b));

    // round trip through the echo line
    std::istringstream lines(a.text(false));
    std::string line, echo;
    while (std::getline(lines, line))
        if (line.rfind("scenario_echo: ", 0) == 0) echo = line.substr(15);
    REQUIRE_FALSE(echo.empty());
    const RunReport c = run_scenario_json(Json::parse(echo));
    CHECK(strip_timing(c) == strip_timing(a));
}

TEST_CASE("builtin reference with task override") {
    Json j = Json::parse(R"({"builtin": "sin-weight-interval",
                             "tasks": [{"type": "kn-concavity", "samples": 512}]})");
    const RunReport rep = run_scenario_json(j);
    CHECK(rep.tasks.size() == 1);
    CHECK(rep.all_pass);
}

TEST_CASE("numerical task failures are recorded without aborting the run") {
    // needle range beyond the collar depth triggers a validation error at the
    // task level -> the run aborts with a schema-style error; a focal point
    // inside the range is a numerical error and is recorded per task
    Json j = Json::parse(R"({
      "name": "focal-case",
      "space": {
        "type": "glued",
        "side0": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 1.5707]],
                  "metric": ["cos(x2)^2", "0", "1"], "weight": "1", "N": 2,
                  "faces": [{"axis": 2, "side": "min", "role": "glue"}]},
        "side1": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 1.5707]],
                  "metric": ["cos(x2)^2", "0", "1"], "weight": "1", "N": 2,
                  "faces": [{"axis": 2, "side": "min", "role": "glue"}]}
      },
      "tasks": [
        {"type": "needle", "y": [[1.0]], "t_range": [-1.5707, 1.5707], "K": 1, "N": 2},
        {"type": "compatibility"}
      ]
    })");
    const RunReport rep = run_scenario_json(j);
    CHECK(rep.exit_code == 3);
    REQUIRE(rep.tasks.size() == 2);
    CHECK(rep.tasks[0].numeric_error);
    CHECK(rep.tasks[1].pass);  // later tasks still ran
}
