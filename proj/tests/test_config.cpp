#include <doctest.h>

#include <cstdlib>

#include "weaver/config.hpp"

using weaver::config::ConfigError;
using weaver::config::Settings;

TEST_SUITE("config") {

TEST_CASE("empty text yields the defaults") {
    Settings s = weaver::config::parse("");
    CHECK(s == Settings{});
    CHECK(s.matchTheta == 0.5);
    CHECK(s.matchDecay == 0.5);
    CHECK(s.matchMaxHops == 2);
    CHECK(s.selectScoreFirst == false);
    CHECK(s.composeMaxDepth == 4);
    CHECK(s.composeUseIsa == false);
    CHECK(s.orchestratorUseName == true);
    CHECK(s.chunkPattern == "(ADJ|N)*N");
}

TEST_CASE("keys override defaults; comments and blanks are skipped") {
    Settings s = weaver::config::parse(
        "# pipeline tuning\n"
        "\n"
        "match.theta = 0.25\n"
        "match.decay = 0.75   # keep shallow matches strong\n"
        "match.max_hops = 3\n"
        "select.score_first = true\n"
        "compose.max_depth = 6\n"
        "compose.use_isa = true\n"
        "orchestrator.use_name = false\n"
        "chunk_pattern = (ADJ)*N\n");
    CHECK(s.matchTheta == 0.25);
    CHECK(s.matchDecay == 0.75);
    CHECK(s.matchMaxHops == 3);
    CHECK(s.selectScoreFirst == true);
    CHECK(s.composeMaxDepth == 6);
    CHECK(s.composeUseIsa == true);
    CHECK(s.orchestratorUseName == false);
    CHECK(s.chunkPattern == "(ADJ)*N");
}

TEST_CASE("unknown keys are rejected with the line number") {
    try {
        weaver::config::parse("match.theta = 0.5\nmatch.thety = 0.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.code() == "ConfigError");
    }
}

TEST_CASE("out-of-range and malformed values are rejected") {
    CHECK_THROWS_AS(weaver::config::parse("match.theta = 1.5"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.theta = -0.1"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.decay = 0"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.decay = 1.01"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.max_hops = -1"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("compose.max_depth = 0"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.theta = abc"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("select.score_first = yes"), ConfigError);
    CHECK_THROWS_AS(weaver::config::parse("match.theta"), ConfigError);
}

TEST_CASE("boundary values parse") {
    CHECK(weaver::config::parse("match.theta = 0").matchTheta == 0.0);
    CHECK(weaver::config::parse("match.theta = 1").matchTheta == 1.0);
    CHECK(weaver::config::parse("match.decay = 1").matchDecay == 1.0);
    CHECK(weaver::config::parse("match.max_hops = 0").matchMaxHops == 0);
}

TEST_CASE("environment fallback") {
    unsetenv("BPMN_WEAVER_CONFIG");
    CHECK(weaver::config::from_env_or_defaults() == Settings{});

    std::string path = "/tmp/weaver_env_config.cfg";
    {
        FILE* f = fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        fputs("match.theta = 0.9\n", f);
        fclose(f);
    }
    setenv("BPMN_WEAVER_CONFIG", path.c_str(), 1);
    CHECK(weaver::config::from_env_or_defaults().matchTheta == 0.9);
    unsetenv("BPMN_WEAVER_CONFIG");
    remove(path.c_str());
}

}
