#include "doctest.h"
#include "neurolens/harness.hpp"
#include "neurolens/image.hpp"
#include "neurolens/pipeline.hpp"
#include "support.hpp"

#include <fstream>

using namespace neurolens;
namespace fs = std::filesystem;

namespace {

// One recorded harness shared by the cases below.
const fs::path &harness_dir() {
  static testing::TempDir dir("pipeline");
  static const bool written = [] {
    write_harness(dir.path(), default_harness_spec());
    return true;
  }();
  (void)written;
  return dir.path();
}

PipelineConfig harness_config(const fs::path &out) {
  auto c = load_config(harness_dir() / "pipeline.cfg");
  c.out_dir = out;
  return c;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("stage names") {
  for (Stage s : all_stages()) {
    CHECK(parse_stage(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_stage("embed"), ConfigError);
}

TEST_CASE("full run in mock mode writes every artifact") {
  testing::TempDir out("run");
  auto config = harness_config(out.path());
  config.neurons = "0,7";
  const auto ctx = RunContext::load(config, make_backends(config));
  const auto outcomes = run_pipeline(ctx);
  REQUIRE(outcomes.size() == 2);
  CHECK(outcomes[0].errors.empty());
  CHECK(outcomes[0].concept_name.has_value());
  CHECK(outcomes[1].refusal);
  CHECK(outcomes[1].score == 0.0);
  CHECK(fs::exists(out / "run_manifest.json"));
  for (const char *f : {exemplars_file, selection_file, grid_file, proposal_file, report_file}) {
    CHECK(fs::exists(ctx.neuron_dir(0) / f));
  }
  CHECK(fs::exists(ctx.neuron_dir(0) / "images"));
  const auto text = read_png_text(read_file(ctx.neuron_dir(0) / grid_file));
  CHECK(text.at("neuron") == "synthetic/planted/0");
  const auto selection = nlohmann::json::parse(read_text_file(ctx.neuron_dir(0) / selection_file));
  CHECK(text.at("inputs").find(std::to_string(selection.at("input_indices")[0].get<std::size_t>())) == 0);
  CHECK(!fs::exists(ctx.neuron_dir(7) / "images"));
  const auto table = summary_table(outcomes);
  CHECK(table.find("<refused>") != std::string::npos);
  CHECK(table.find(*outcomes[0].concept_name) != std::string::npos);
}

TEST_CASE("re-running a stage reproduces its artifact byte for byte") {
  testing::TempDir out("rerun");
  auto config = harness_config(out.path());
  config.neurons = "1";
  const auto ctx = RunContext::load(config, make_backends(config));
  run_pipeline(ctx);
  for (Stage s : all_stages()) {
    const char *file = s == Stage::exemplars ? exemplars_file
                       : s == Stage::select  ? selection_file
                       : s == Stage::grid    ? grid_file
                       : s == Stage::propose ? proposal_file
                                             : report_file;
    const auto before = read_file(ctx.neuron_dir(1) / file);
    run_stage(ctx, s, 1);
    CHECK_MESSAGE(read_file(ctx.neuron_dir(1) / file) == before, to_string(s));
  }
}

TEST_CASE("a missing upstream artifact names the stage that produces it") {
  testing::TempDir out("missing");
  auto config = harness_config(out.path());
  const auto ctx = RunContext::load(config, make_backends(config));
  try {
    run_stage(ctx, Stage::grid, 2);
    FAIL("expected MissingArtifactError");
  } catch (const MissingArtifactError &e) {
    CHECK(std::string(e.what()).find("select") != std::string::npos);
  }
  run_stage(ctx, Stage::exemplars, 2);
  run_stage(ctx, Stage::select, 2);
  try {
    run_stage(ctx, Stage::propose, 2);
    FAIL("expected MissingArtifactError");
  } catch (const MissingArtifactError &e) {
    CHECK(std::string(e.what()).find("grid") != std::string::npos);
  }
  CHECK_THROWS_AS(run_stage(ctx, Stage::validate, 2), MissingArtifactError);
}

TEST_CASE("input problems are config errors") {
  testing::TempDir out("bad");
  auto config = harness_config(out.path());
  config.neurons = "40";
  CHECK_THROWS_AS(RunContext::load(config, make_backends(config)), ConfigError);

  config = harness_config(out.path());
  config.store = out / "no_store";
  try {
    make_backends(config);
    FAIL("expected ConfigError");
  } catch (const ConfigError &e) {
    CHECK(std::string(e.what()).find("no_store") != std::string::npos);
  }

  config = harness_config(out.path());
  config.manifest = out / "absent.json";
  CHECK_THROWS_AS(RunContext::load(config, make_backends(config)), ConfigError);
}

TEST_CASE("live mode needs service URLs from the environment") {
  PipelineConfig config;
  config.mode = BackendMode::live;
  config.store.clear();
  const EnvLookup none = [](const std::string &) { return std::optional<std::string>{}; };
  CHECK_THROWS_AS(make_backends(config, none), ConfigError);
  const EnvLookup all = [](const std::string &name) -> std::optional<std::string> {
    if (name.ends_with("_URL")) {
      return "http://127.0.0.1:9";
    }
    return std::nullopt;
  };
  const auto b = make_backends(config, all);
  CHECK(b.mllm != nullptr);
  CHECK(b.activation != nullptr);
}

TEST_CASE("replay mode errors on an unrecorded request") {
  testing::TempDir out("replay");
  auto config = harness_config(out.path());
  config.mode = BackendMode::replay;
  config.caption_pairs = 3; // asks for captions that were never recorded
  config.neurons = "0";
  const auto ctx = RunContext::load(config, make_backends(config));
  const auto outcomes = run_pipeline(ctx);
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].infrastructure_error);
  CHECK(!outcomes[0].errors.empty());
}

TEST_CASE("parallel and serial runs agree") {
  testing::TempDir a("serial");
  testing::TempDir b("parallel");
  auto ca = harness_config(a.path());
  auto cb = harness_config(b.path());
  cb.jobs = 4;
  const auto ctx_a = RunContext::load(ca, make_backends(ca));
  const auto ctx_b = RunContext::load(cb, make_backends(cb));
  const auto oa = run_pipeline(ctx_a);
  const auto ob = run_pipeline(ctx_b);
  REQUIRE(oa.size() == ob.size());
  for (std::size_t i = 0; i < oa.size(); ++i) {
    CHECK(oa[i].score == ob[i].score);
    CHECK(read_file(ctx_a.neuron_dir(oa[i].neuron) / report_file) ==
          read_file(ctx_b.neuron_dir(ob[i].neuron) / report_file));
  }
}

} // TEST_SUITE
