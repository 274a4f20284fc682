#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adaptforge/codec.hpp"
#include "cli.hpp"
#include "fixtures.hpp"

namespace adaptforge {
namespace {

namespace fs = std::filesystem;
using testing::data_path;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "adaptforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> with_data(std::vector<std::string> args) {
  args.push_back("--corpus");
  args.push_back(data_path("scenario/corpus.jsonl"));
  args.push_back("--ontology");
  args.push_back(data_path("scenario/ontology.txt"));
  return args;
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("adaptforge-cli-") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"mine"}).code, 2);  // --seed is required
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, IngestSummarizesTheCorpus) {
  const CliResult r = cli(with_data({"ingest"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["cases"], testing::scenario_casebase()->size());
}

TEST(Cli, DomainErrorsExitWithOne) {
  const CliResult r = cli({"ingest", "--corpus", "/nonexistent.jsonl", "--ontology",
                     data_path("scenario/ontology.txt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("io_error"), std::string::npos) << r.err;
  EXPECT_EQ(cli(with_data({"query", "--want", "durian"})).code, 1);
}

TEST(Cli, QueryPrintsThePaths) {
  const CliResult r = cli(with_data({"query", "--type", "chinese", "--type", "soup", "--want", "leek",
                               "--dont-want", "peanut_oil"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("similarity path: [!peanut_oil => -, leek => onions]"), std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("retrieved: wonton_soup"), std::string::npos);
  EXPECT_NE(r.out.find("adaptation path: [green_onion => leek (specialized), - => !peanut_oil "
                       "(generated)]"),
            std::string::npos)
      << r.out;
}

TEST(Cli, QueryAsJson) {
  const CliResult r = cli(with_data({"query", "--want", "cake", "--want", "baking_chocolate", "--want",
                               "orange", "--json"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["retrieved"], "ultralight_chocolate_cake");
  EXPECT_EQ(j["state"], "CandidateProposed");
}

TEST(Cli, MineFindsTheOliveOilSwap) {
  const CliResult r = cli(with_data({"mine", "--seed", "oil=,peanut_oil-", "--min-supp", "0.2"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& m : j) {
    if (m["properties"] == nlohmann::json{"oil=", "olive_oil+", "peanut_oil-"}) {
      found = true;
      EXPECT_EQ(m["substitution"], "peanut_oil => olive_oil");
    }
  }
  EXPECT_TRUE(found) << r.out;
  EXPECT_EQ(cli(with_data({"mine", "--seed", "oil=", "--min-supp", "2"})).code, 1);
}

TEST_F(CliFiles, AkbImportAndShow) {
  const Ontology& o = *testing::scenario_ontology();
  AdaptationKnowledgeBase incoming;
  incoming.add({QuerySubstitution::drop_negative(o.atom("peanut_oil")),
                parse_solution_substitution("peanut_oil => olive_oil", o),
                {"s", "2024-01-01T00:00:00.000Z", "expert"}});
  save(incoming, dir_ / "in.json", o);
  const std::string live = (dir_ / "live.json").string();
  const std::string onto = data_path("scenario/ontology.txt");

  CliResult r = cli({"akb", "import", "--akb", live, "--ontology", onto, "--from",
               (dir_ / "in.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["imported"], 1);
  r = cli({"akb", "import", "--akb", live, "--ontology", onto, "--from",
           (dir_ / "in.json").string()});
  EXPECT_EQ(nlohmann::json::parse(r.out)["duplicates"], 1);
  r = cli({"akb", "show", "--akb", live, "--ontology", onto});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(from_json_text(r.out, o), incoming);
}

TEST_F(CliFiles, ReplayRebuildsTheStoredReformulation) {
  Engine engine = testing::scenario_engine();
  Session s("logged", engine, testing::counting_clock());
  s.submit_query(testing::q("chinese&soup&leek&!peanut_oil"));
  s.feedback({Feedback::Kind::kMissingIngredient, 0, ""});
  s.configure_repair({RepairStrategy::kReplaceWithinParent, {}, {}, ""});
  s.run_discovery(0.2);
  const Variation want = parse_seed("oil=,olive_oil+,peanut_oil-", engine.ontology());
  for (std::size_t i = 0; i < s.suggestions().size(); ++i)
    if (s.suggestions()[i].variation == want) ASSERT_TRUE(s.select(i));
  s.validate(Decision::kAccept, "expert");
  ASSERT_TRUE(s.stored());
  {
    std::ofstream log(dir_ / "logged.jsonl");
    for (const auto& e : s.log()) log << to_json_line(e) << '\n';
  }
  const CliResult r = cli(with_data({"replay", (dir_ / "logged.jsonl").string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["state"], "Completed");
  EXPECT_EQ(j["stored"].dump(), codec::to_json(*s.stored(), engine.ontology()).dump());
  // Twice in a row gives the same bytes.
  EXPECT_EQ(cli(with_data({"replay", (dir_ / "logged.jsonl").string()})).out, r.out);
}

}  // namespace
}  // namespace adaptforge
