#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "nashlab/pipeline.hpp"

using namespace nashlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nashlab-test-" + name);
  fs::remove_all(p);
  return p;
}

PipelineConfig config(const fs::path& out, std::uint64_t seed) {
  PipelineConfig c;
  c.out_dir = out;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("full n = 6 run: seven artifacts, reproducible, every file reads back") {
    auto a = scratch("a"), b = scratch("b");
    auto ma = run_pipeline(config(a, 1));
    auto mb = run_pipeline(config(b, 1));
    REQUIRE(ma.artifacts.size() == 7);
    CHECK(ma.json == mb.json);
    for (std::size_t i = 0; i < 7; ++i) CHECK(ma.artifacts[i].sha256 == mb.artifacts[i].sha256);
    auto j = nlohmann::json::parse(read_text_file(a / "manifest.json"));
    CHECK(j["artifacts"].size() == 7);
    CHECK(j["summary"]["verify"]["vertex"] == j["summary"]["fixed_point"]["vertex"]);
    CHECK(j["summary"]["embedding"]["violations"] == 0);
    for (const auto& e : ma.artifacts) CHECK(sha256_hex(read_text_file(a / e.file)) == e.sha256);
    // a verify-only rerun reads the artifacts back
    auto c = config(a, 1);
    c.stages = {"verify"};
    CHECK_NOTHROW(run_pipeline(c));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("a lone brouwer stage names its missing input") {
    auto out = scratch("missing");
    auto c = config(out, 1);
    c.stages = {"brouwer"};
    try {
      run_pipeline(c);
      FAIL("expected a pipeline error");
    } catch (const PipelineError& e) {
      CHECK(e.stage() == "brouwer");
      CHECK(std::string(e.what()).find("instance") != std::string::npos);
    }
    fs::remove_all(out);
  }

  TEST_CASE("another seed changes the instance hash but not the schema") {
    auto a = scratch("s1"), b = scratch("s2");
    auto c1 = config(a, 1), c2 = config(b, 2);
    c1.stages = c2.stages = {"instance", "code", "family"};
    auto m1 = run_pipeline(c1), m2 = run_pipeline(c2);
    REQUIRE(m1.artifacts.size() == m2.artifacts.size());
    CHECK(m1.artifacts[0].name == "instance");
    CHECK(m1.artifacts[0].sha256 != m2.artifacts[0].sha256);
    auto j1 = nlohmann::json::parse(m1.json), j2 = nlohmann::json::parse(m2.json);
    for (auto it = j1.begin(); it != j1.end(); ++it) CHECK(j2.contains(it.key()));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  TEST_CASE("config validation") {
    PipelineConfig c;
    CHECK_NOTHROW(c.validate());
    c.stages = {"brouwer", "nope"};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = PipelineConfig{};
    c.ell = 1;
    CHECK_THROWS(c.validate());
    c = PipelineConfig{};
    c.profile = "no-such-profile";
    CHECK_THROWS(c.validate());
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}
