#include <gtest/gtest.h>

#include "flexloc/config.hpp"
#include "support.hpp"

using namespace flexloc;

TEST(Config, EmptyFileGivesDefaults) {
  auto c = run_config_from_ini("");
  EXPECT_EQ(c.flexfl.agent.pipeline.k, 5u);
  EXPECT_EQ(c.flexfl.agent.pipeline.max_calls, 10u);
  EXPECT_EQ(c.flexfl.agent.pipeline.repetition_runs, 1u);
  EXPECT_EQ(c.flexfl.fusion.m, 20u);
  EXPECT_EQ(c.flexfl.fusion.k, 5u);
  EXPECT_EQ(c.flexfl.fusion.technique_order, (std::vector<std::string>{"sbir", "ochiai", "boostn"}));
  EXPECT_EQ(c.flexfl.agent.sampling, SamplingConfig{});
  EXPECT_EQ(c.flexfl.agent.matcher.edit_distance_threshold, 5u);
  EXPECT_EQ(c.flexfl.agent.tool_output_cap, 6000u);
  EXPECT_DOUBLE_EQ(c.flexfl.bm25.k1, 1.2);
  EXPECT_DOUBLE_EQ(c.flexfl.bm25.b, 0.75);
  EXPECT_EQ(c.flexfl.bm25.title_weight, 3);
  EXPECT_EQ(c.flexfl.sbfl, SbflFormula::Ochiai);
  EXPECT_FALSE(c.sampling_set);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, EverySectionIsRead) {
  auto c = run_config_from_ini(
      "[pipeline]\nk = 3\nmax_calls = 7\nmin_max_calls = 2\nrepetition_runs = 4\n"
      "[fusion]\nm = 12\ntechnique_order = boostn, sbir\nllm_technique = llm\n"
      "[matcher]\nedit_distance_threshold = 3\nfallback_count = 2\n"
      "[sampling]\ntemperature = 0.6\ntop_p = 0.9\nmax_response_tokens = 256\n"
      "[gateway]\nurl = http://localhost:8000/v1/chat/completions\nmodel = m\nmax_attempts = 5\n"
      "initial_backoff_ms = 10\ntimeout_seconds = 30\ncontext_limit = 4096\n"
      "[toolbox]\noutput_cap = 500\n"
      "[bm25]\nk1 = 1.5\nb = 0.5\ntitle_weight = 2\n"
      "[sbfl]\nformula = dstar2\n");
  const auto& p = c.flexfl.agent.pipeline;
  EXPECT_EQ(p.k, 3u);
  EXPECT_EQ(p.max_calls, 7u);
  EXPECT_EQ(p.min_max_calls, 2u);
  EXPECT_EQ(p.repetition_runs, 4u);
  EXPECT_EQ(c.flexfl.fusion.m, 12u);
  EXPECT_EQ(c.flexfl.fusion.k, 3u);
  EXPECT_EQ(c.flexfl.fusion.technique_order, (std::vector<std::string>{"boostn", "sbir"}));
  EXPECT_EQ(c.flexfl.fusion.llm_technique, "llm");
  EXPECT_EQ(c.flexfl.agent.matcher.fallback_count, 2u);
  EXPECT_EQ(c.flexfl.agent.sampling, (SamplingConfig{0.6, 0.9, 256}));
  EXPECT_TRUE(c.sampling_set);
  EXPECT_EQ(c.gateway.url, "http://localhost:8000/v1/chat/completions");
  EXPECT_EQ(c.gateway.max_attempts, 5);
  EXPECT_EQ(c.gateway.initial_backoff.count(), 10);
  EXPECT_EQ(c.gateway.context_limit, 4096u);
  EXPECT_EQ(c.flexfl.agent.tool_output_cap, 500u);
  EXPECT_DOUBLE_EQ(c.flexfl.bm25.b, 0.5);
  EXPECT_EQ(c.flexfl.sbfl, SbflFormula::DStar2);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsUnknownSectionsKeysAndBadValues) {
  EXPECT_THROW(run_config_from_ini("[pipelin]\nk = 3\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[pipeline]\nkk = 3\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[pipeline]\nk = three\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[pipeline]\nk = 3x\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[sbfl]\nformula = jaccard\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[gateway]\napi_key = secret\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("k = 3\n"), ConfigError);
  EXPECT_THROW(run_config_from_ini("[pipeline\n"), ConfigError);
}

TEST(Config, ErrorsNameTheKey) {
  try {
    run_config_from_ini("[fusion]\nm = lots\n", "run.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("fusion.m"), std::string::npos) << e.what();
  }
}

TEST(Config, ValidateCatchesInconsistentValues) {
  auto c = run_config_from_ini("[fusion]\nm = 3\n");
  EXPECT_THROW(c.validate(), ConfigError);  // k = 5 > m
  c = run_config_from_ini("[toolbox]\noutput_cap = 10\n");
  EXPECT_THROW(c.validate(), ConfigError);
  c = run_config_from_ini("[sampling]\ntop_p = 1.5\n");
  EXPECT_THROW(c.validate(), ConfigError);
  c = run_config_from_ini("[pipeline]\nmax_calls = 0\n");
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, RankedPathsResolveAgainstTheConfigDirectory) {
  testsupport::TempDir dir;
  dir.write("lists/sbir.jsonl", "{\"rank\":1,\"fqn\":\"a.B.c()\"}\n");
  auto file = dir.write("run.ini", "[ranked]\nsbir = lists/sbir.jsonl\nochiai = /abs/ochiai.jsonl\n");
  auto c = load_run_config(file);
  EXPECT_EQ(c.ranked_files.at("sbir"), dir.path() / "lists/sbir.jsonl");
  EXPECT_EQ(c.ranked_files.at("ochiai"), std::filesystem::path("/abs/ochiai.jsonl"));
  EXPECT_THROW(c.validate(), ConfigError);
  c.ranked_files.erase("ochiai");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_run_config("/nonexistent/run.ini"), ConfigError);
}
