#include "doctest.h"

#include "gouflow/config.hpp"
#include "gouflow/suites.hpp"

using namespace gouflow;

namespace {

std::string error_of(const std::string& yaml)
{
    try {
        parse_config(yaml, "exp.yaml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

const char* custom_yaml = R"(schema_version: 1
seed: 7
model:
  drift: [-0.5, 0.3]
  jump_intensity: 1.0
  jump_law:
    type: point_mass
    atoms:
      - [0.5, 0.4, 0.5]
      - [-0.3, 0.0, 0.5]
paths: 200
suite: [duality]
probes: {t: [1.0], x: [0.0, 1.0], y: [0.5]}
)";

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("preset config by name")
    {
        const ExperimentConfig c = parse_config("schema_version: 1\nseed: 3\nmodel: dufresne\n");
        CHECK(c.model_name == "dufresne");
        CHECK(c.seed == 3);
        CHECK(c.backend == Backend::euler);
        CHECK(c.suites == suite_names());
        CHECK(c.skip_inapplicable);
        CHECK(parse_config("schema_version: 1\nseed: 3\nmodel: {preset: zero}\n").model_name == "zero");
    }

    TEST_CASE("custom model")
    {
        const ExperimentConfig c = parse_config(custom_yaml);
        CHECK(c.model_name == "custom");
        CHECK(c.model.jump_intensity() == 1.0);
        CHECK(c.paths == 200);
        CHECK(c.suites == std::vector<std::string>{"duality"});
        CHECK_FALSE(c.skip_inapplicable);
        CHECK(c.params.grid.xs == std::vector<double>{0.0, 1.0});
    }

    TEST_CASE("errors name the offending line")
    {
        CHECK(error_of("schema_version: 1\nseed: 3\nmodel: zero\nbogus: 1\n").rfind("exp.yaml:4:", 0) == 0);
        CHECK(error_of("schema_version: 1\nmodel: zero\n").find("seed") != std::string::npos);
        CHECK(error_of("schema_version: 2\nseed: 1\nmodel: zero\n").rfind("exp.yaml:1:", 0) == 0);
        CHECK(error_of("schema_version: 1\nseed: 1\nmodel: nope\n").rfind("exp.yaml:3:", 0) == 0);
        CHECK(error_of("schema_version: 1\nseed: -4\nmodel: zero\n").find("seed") != std::string::npos);
        CHECK(error_of("schema_version: 1\nseed: 1\nmodel: dufresne\nbackend: exact\n").rfind("exp.yaml:4:", 0) == 0);
        CHECK(error_of("schema_version: 1\nseed: 1\nmodel: zero\nsuite: [duality, nope]\n").rfind("exp.yaml:4:", 0) ==
              0);
        CHECK(error_of("schema_version: 1\nseed: [1\n").rfind("exp.yaml:", 0) == 0);
        CHECK(error_of("schema_version: 1\nseed: 1\nmodel: zero\n").empty());
    }

    TEST_CASE("config hash ignores run-time settings")
    {
        ExperimentConfig a = parse_config(custom_yaml);
        ExperimentConfig b = a;
        b.workers = 8;
        b.out_dir = "elsewhere";
        CHECK(config_hash(a) == config_hash(b));
        CHECK(config_hash(a).size() == 16);
        b.seed = 8;
        CHECK(config_hash(a) != config_hash(b));
        CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    }

    TEST_CASE("zero preset passes and the summary is deterministic")
    {
        ExperimentConfig c = preset_config("zero", 11);
        c.paths = 100;
        c.suites = {"duality", "inverse-flow", "monotonicity"};
        const ExperimentSummary one = run_experiment(c);
        CHECK(one.ok());
        c.workers = 2;
        const ExperimentSummary two = run_experiment(c);
        CHECK(one.json() == two.json());
        const auto j = nlohmann::json::parse(one.json());
        CHECK(j["pass"] == true);
        CHECK(j["suites"].size() == 3);
    }

    TEST_CASE("inapplicable suites are refused by name and skipped under all")
    {
        ExperimentConfig c = preset_config("nonmonotone", 1);
        c.paths = 100;
        c.suites = {"duality"};
        c.skip_inapplicable = false;
        const ExperimentSummary refused = run_experiment(c);
        REQUIRE(refused.results.size() == 1);
        CHECK(refused.results[0].status == "refused");
        CHECK_FALSE(refused.ok());
        c.skip_inapplicable = true;
        CHECK(run_experiment(c).results[0].status == "skipped");
    }
}
