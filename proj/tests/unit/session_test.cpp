#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace adaptforge {
namespace {

using testing::counting_clock;
using testing::q;
using testing::scenario_engine;

std::vector<std::string> event_names(const Session& s) {
  std::vector<std::string> out;
  for (const auto& e : s.log()) out.push_back(e.event);
  return out;
}

std::optional<std::size_t> find_suggestion(const Session& s, std::string_view seed) {
  const Variation want = parse_seed(seed, s.engine().ontology());
  for (std::size_t i = 0; i < s.suggestions().size(); ++i)
    if (s.suggestions()[i].variation == want) return i;
  return std::nullopt;
}

// Runs the leek soup repair up to a validated olive oil substitution.
void repair_leek_soup(Session& s) {
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  s.feedback({Feedback::Kind::kMissingIngredient, 0, "no oil"});
  s.diagnose({true, false});
  s.configure_repair({RepairStrategy::kReplaceWithinParent, std::nullopt, std::nullopt, ""});
  s.run_discovery(0.2);
  const auto pick = find_suggestion(s, "oil=,olive_oil+,peanut_oil-");
  ASSERT_TRUE(pick.has_value());
  ASSERT_TRUE(s.select(*pick));
  s.validate(Decision::kAccept, "expert");
}

TEST(SessionParsing, NamesRoundTrip) {
  EXPECT_EQ(parse_feedback_kind("step_invalid"), Feedback::Kind::kStepInvalid);
  EXPECT_EQ(to_string(Feedback::Kind::kRefineRequest), "refine_request");
  EXPECT_EQ(parse_repair_strategy("replace_within_parent"), RepairStrategy::kReplaceWithinParent);
  EXPECT_ERROR_CODE(parse_repair_strategy("guess"), ErrorCode::kUnknownStrategy);
  EXPECT_EQ(parse_decision("reject_all"), Decision::kRejectAll);
  EXPECT_ERROR_CODE(parse_decision("maybe"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(to_string(SessionState::kSuggestionsReady), "SuggestionsReady");
}

TEST(Session, LeekSoupRepairEndToEnd) {
  Engine engine = scenario_engine();
  Session s("s", engine, counting_clock());
  EXPECT_EQ(s.state(), SessionState::kAwaitingQuery);
  repair_leek_soup(s);
  EXPECT_EQ(s.state(), SessionState::kCompleted);
  ASSERT_TRUE(s.stored().has_value());
  const Ontology& o = engine.ontology();
  EXPECT_EQ(render(s.stored()->q, o), "!peanut_oil => -");
  EXPECT_EQ(render(s.stored()->r, o), "peanut_oil => olive_oil");
  EXPECT_EQ(s.stored()->provenance.validator, "expert");
  EXPECT_EQ(s.stored()->provenance.session_id, "s");
  EXPECT_EQ(engine.akb->snapshot()->size(), 1u);
  EXPECT_EQ(s.adaptation_path().origins.back(), StepOrigin::kUser);
  EXPECT_TRUE(entails_cw(*s.candidate(), q("chinese&soup&leek&!peanut_oil"), o));
  EXPECT_TRUE(s.candidate()->atoms.contains(o.atom("olive_oil")));
  EXPECT_EQ(event_names(s), (std::vector<std::string>{"created", "query", "feedback", "diagnose",
                                                      "repair", "mine", "select", "validate"}));
}

TEST(Session, OperationsOutOfOrderAreIllegal) {
  Session s("s", scenario_engine(), counting_clock());
  EXPECT_ERROR_CODE(s.feedback({}), ErrorCode::kIllegalState);
  EXPECT_ERROR_CODE(s.diagnose({}), ErrorCode::kIllegalState);
  EXPECT_ERROR_CODE(s.select(0), ErrorCode::kIllegalState);
  EXPECT_ERROR_CODE(s.validate(Decision::kAccept, "x"), ErrorCode::kIllegalState);
  EXPECT_ERROR_CODE(s.run_discovery(), ErrorCode::kIllegalState);
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  EXPECT_ERROR_CODE(s.submit_query(q("soup")), ErrorCode::kIllegalState);
  EXPECT_ERROR_CODE(s.configure_repair({}), ErrorCode::kIllegalState);
  EXPECT_EQ(s.state(), SessionState::kCandidateProposed);
}

TEST(Session, NoPathKeepsWaitingForAQuery) {
  Engine engine = scenario_engine();
  engine.config.retrieval.cost_bound = 0.5;
  Session s("s", engine, counting_clock());
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  EXPECT_EQ(s.state(), SessionState::kAwaitingQuery);
  ASSERT_TRUE(s.failure().has_value());
  EXPECT_EQ(s.failure()->code, ErrorCode::kNoPath);
  EXPECT_EQ(s.log().back().payload["failure"], "no_path");
  EXPECT_ERROR_CODE(s.submit_query(q("leek&!onions")), ErrorCode::kInconsistentQuery);
}

TEST(Session, AcceptingAnUnchangedCaseCompletes) {
  Session s("s", scenario_engine(), counting_clock());
  s.submit_query(q("chinese&soup"));
  EXPECT_TRUE(s.adaptation_path().empty());
  EXPECT_ERROR_CODE(s.feedback({Feedback::Kind::kMissingIngredient, 0, ""}),
                    ErrorCode::kIllegalState);
  s.feedback({Feedback::Kind::kAccept, 0, ""});
  EXPECT_EQ(s.state(), SessionState::kCompleted);
}

TEST(Session, Diagnosis) {
  Session s("s", scenario_engine(), counting_clock());
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  EXPECT_ERROR_CODE(s.feedback({Feedback::Kind::kStepInvalid, 5, ""}),
                    ErrorCode::kInvalidArgument);
  s.feedback({Feedback::Kind::kRefineRequest, 0, ""});
  EXPECT_TRUE(s.refine_active());
  EXPECT_ERROR_CODE(s.diagnose({true}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(s.diagnose({false, true}), ErrorCode::kInconsistentVerdicts);
  EXPECT_EQ(s.diagnose({true, true}), std::nullopt);
  EXPECT_EQ(s.state(), SessionState::kCandidateProposed);
  s.feedback({Feedback::Kind::kStepInvalid, 0, ""});
  EXPECT_EQ(s.culprit(), std::optional<std::size_t>{0});
  EXPECT_EQ(s.diagnose({false, false}), std::optional<std::size_t>{0});
}

TEST(Session, RepairSeeds) {
  Session s("s", scenario_engine(), counting_clock());
  const Ontology& o = s.engine().ontology();
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  s.feedback({Feedback::Kind::kMissingIngredient, 0, ""});
  // No culprit yet: the last step (the removal) is repaired.
  EXPECT_EQ(render(s.configure_repair({RepairStrategy::kReplaceWithinParent, {}, {}, ""}), o),
            "oil=,peanut_oil-");
  EXPECT_EQ(s.culprit(), std::optional<std::size_t>{1});
  EXPECT_EQ(render(s.configure_repair({RepairStrategy::kRefineCurrent, 1, {}, ""}), o),
            "peanut_oil-");
  EXPECT_EQ(render(s.configure_repair({RepairStrategy::kRefineCurrent, 0, {}, ""}), o),
            "green_onion-,leek+");
  EXPECT_EQ(s.solution_under_repair().id, "wonton_soup");
  EXPECT_EQ(render(s.configure_repair({RepairStrategy::kExplicit, 0, {}, "green_onion-,leek+,soup="}), o),
            "green_onion-,leek+,soup=");
  EXPECT_ERROR_CODE(s.configure_repair({RepairStrategy::kReplaceWithinParent, 0, {}, ""}),
                    ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(s.configure_repair({RepairStrategy::kReplaceWithinParent, 1, "soup", ""}),
                    ErrorCode::kNoParent);
  EXPECT_ERROR_CODE(s.configure_repair({RepairStrategy::kRefineCurrent, 2, {}, ""}),
                    ErrorCode::kInvalidArgument);
  EXPECT_EQ(s.state(), SessionState::kRepairConfigured);
}

TEST(Session, SelectionAndRejection) {
  Session s("s", scenario_engine(), counting_clock());
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  s.feedback({Feedback::Kind::kMissingIngredient, 0, ""});
  s.configure_repair({RepairStrategy::kReplaceWithinParent, {}, {}, ""});
  const auto& sugg = s.run_discovery(0.2);
  ASSERT_FALSE(sugg.empty());
  EXPECT_ERROR_CODE(s.select(sugg.size()), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(s.validate(Decision::kAccept, "x"), ErrorCode::kIllegalState);
  const auto pick = find_suggestion(s, "oil=,olive_oil+,peanut_oil-");
  ASSERT_TRUE(pick);
  ASSERT_TRUE(s.select(*pick));
  ASSERT_TRUE(s.proposed_candidate().has_value());
  s.validate(Decision::kReject, "expert");
  EXPECT_EQ(s.state(), SessionState::kSuggestionsReady);
  EXPECT_FALSE(s.selection().has_value());
  s.validate(Decision::kRejectAll, "expert");
  EXPECT_EQ(s.state(), SessionState::kRepairConfigured);
  EXPECT_EQ(s.engine().akb->snapshot()->size(), 0u);
}

TEST(Session, StaleDiscoveryIsRefused) {
  Session s("s", scenario_engine(), counting_clock());
  s.submit_query(q("chinese&soup&leek&!peanut_oil"));
  s.feedback({Feedback::Kind::kMissingIngredient, 0, ""});
  s.configure_repair({RepairStrategy::kReplaceWithinParent, {}, {}, ""});
  const DiscoveryJob job = s.prepare_discovery(0.2);
  EXPECT_ERROR_CODE(s.prepare_discovery(0.0), ErrorCode::kInvalidArgument);
  DiscoveryResult res = run_discovery_job(job);
  EXPECT_GT(res.training_size, 0u);
  s.configure_repair({RepairStrategy::kRefineCurrent, {}, {}, ""});
  EXPECT_ERROR_CODE(s.commit_discovery(std::move(res)), ErrorCode::kIllegalState);
}

TEST(Session, AStoredReformulationIsReused) {
  Engine engine = scenario_engine();
  Session first("a", engine, counting_clock());
  repair_leek_soup(first);
  Session second("b", engine, counting_clock());
  second.submit_query(q("chinese&soup&leek&!peanut_oil"));
  EXPECT_EQ(second.adaptation_path().origins.back(), StepOrigin::kAkb);
  EXPECT_EQ(second.log()[1].payload["akbEntries"], 1);
}

TEST(Replay, ReproducesTheStoredReformulationAndLog) {
  Engine engine = scenario_engine();
  Session s("s", engine, counting_clock());
  repair_leek_soup(s);
  std::string text;
  for (const auto& e : s.log()) text += to_json_line(e) + "\n";

  const auto events = parse_event_log(text);
  ASSERT_EQ(events.size(), s.log().size());
  const Session again = replay(events, scenario_engine(), AdaptationKnowledgeBase{});
  EXPECT_EQ(again.state(), SessionState::kCompleted);
  EXPECT_EQ(again.id(), "s");
  ASSERT_TRUE(again.stored().has_value());
  EXPECT_EQ(*again.stored(), *s.stored());
  std::string replayed;
  for (const auto& e : again.log()) replayed += to_json_line(e) + "\n";
  EXPECT_EQ(replayed, text);
}

TEST(Replay, MalformedLogs) {
  EXPECT_ERROR_CODE(parse_event_log("{not json}\n"), ErrorCode::kParseError);
  EXPECT_ERROR_CODE(replay({}, scenario_engine(), {}), ErrorCode::kParseError);
}

}  // namespace
}  // namespace adaptforge
