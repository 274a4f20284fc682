#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"

namespace adaptforge {
namespace {

using testing::data_path;

TEST(Config, ParsesKeysCommentsAndBlankLines) {
  const ServiceConfig cfg = parse_config(
      "# service\n"
      "corpus = a.jsonl\n"
      "\n"
      "port=9000   # inline\n"
      "min_support = 0.35\n"
      "cost_bound = 4.5\n"
      "unknown_atom_policy = auto_add\n"
      "workers = 3\n");
  EXPECT_EQ(cfg.corpus, "a.jsonl");
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_DOUBLE_EQ(cfg.min_support, 0.35);
  EXPECT_DOUBLE_EQ(cfg.retrieval.cost_bound, 4.5);
  EXPECT_EQ(cfg.unknown_atom_policy, UnknownAtomPolicy::kAutoAdd);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(cfg.host, "127.0.0.1");  // untouched default
}

TEST(Config, ErrorsNameTheLine) {
  try {
    parse_config("port = 1\nport = many\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_ERROR_CODE(parse_config("colour = blue"), ErrorCode::kParseError);
  EXPECT_ERROR_CODE(parse_config("just words"), ErrorCode::kParseError);
  EXPECT_ERROR_CODE(parse_config("unknown_atom_policy = lax"), ErrorCode::kParseError);
}

TEST(Config, EnvironmentOverridesTheFile) {
  ServiceConfig cfg = parse_config("min_support = 0.2\nport = 1\n");
  const std::map<std::string, std::string> env{{"ADAPTFORGE_MIN_SUPPORT", "0.5"},
                                               {"ADAPTFORGE_LOG_DIR", " /tmp/logs "}};
  apply_env(cfg, [&](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_DOUBLE_EQ(cfg.min_support, 0.5);
  EXPECT_EQ(cfg.log_dir, "/tmp/logs");
  EXPECT_EQ(cfg.port, 1);
  EXPECT_ERROR_CODE(apply_env(cfg, [](const char* k) -> const char* {
                      return std::string_view(k) == "ADAPTFORGE_PORT" ? "x" : nullptr;
                    }),
                    ErrorCode::kParseError);
}

TEST(Config, ValidateAndBuildEngine) {
  ServiceConfig cfg;
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kInvalidArgument);  // no corpus
  cfg.corpus = data_path("scenario/corpus.jsonl");
  cfg.ontology = data_path("scenario/ontology.txt");
  EXPECT_NO_THROW(validate(cfg));
  cfg.min_support = 0.0;
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kInvalidArgument);
  cfg.min_support = 0.3;
  cfg.ontology = data_path("scenario/missing.txt");
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kIoError);
  cfg.ontology = data_path("scenario/ontology.txt");
  const Engine engine = make_engine(cfg);
  EXPECT_EQ(engine.cb->size(), testing::scenario_casebase()->size());
  EXPECT_DOUBLE_EQ(engine.config.min_support, 0.3);
  EXPECT_EQ(engine.akb->snapshot()->size(), 0u);
}

TEST(Config, ShippedScenarioConfigParses) {
  const ServiceConfig cfg = load_config(data_path("scenario/adaptforge.conf"));
  EXPECT_DOUBLE_EQ(cfg.min_support, 0.2);
  EXPECT_FALSE(cfg.corpus.empty());
}

}  // namespace
}  // namespace adaptforge
