#include <gtest/gtest.h>

#include <filesystem>
#include <thread>

#include <httplib.h>

#include "adaptforge/service.hpp"
#include "fixtures.hpp"

namespace adaptforge {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

ServiceOptions quick_options() {
  ServiceOptions o;
  o.mining_wait_ms = 30000;
  o.workers = 1;
  o.clock = testing::counting_clock();
  return o;
}

class Router : public ::testing::Test {
 protected:
  Router() : service_(testing::scenario_engine(), quick_options()) {}

  Response call(std::string_view method, const std::string& path, const Json& body = {}) {
    return service_.handle(method, path, body.is_null() ? "" : body.dump());
  }
  std::string create() {
    const Response r = call("POST", "/sessions");
    EXPECT_EQ(r.status, 201);
    return r.body["id"].get<std::string>();
  }
  // Session ready for mining: leek soup query, removal step under repair.
  std::string repair_configured() {
    const std::string id = create();
    EXPECT_EQ(call("POST", "/sessions/" + id + "/query",
                   {{"wantIngredients", {"leek"}},
                    {"wantTypes", {"chinese", "soup"}},
                    {"dontWantIngredients", {"peanut_oil"}}})
                  .status,
              200);
    EXPECT_EQ(call("POST", "/sessions/" + id + "/feedback", {{"kind", "missing_ingredient"}}).status,
              200);
    EXPECT_EQ(call("POST", "/sessions/" + id + "/diagnose", {{"verdicts", {true, false}}}).status,
              200);
    EXPECT_EQ(call("POST", "/sessions/" + id + "/repair",
                   {{"strategy", "replace_within_parent"}})
                  .status,
              200);
    return id;
  }

  Service service_;
};

std::optional<std::size_t> olive_oil(const Json& session) {
  for (const auto& s : session["suggestions"])
    if (s["substitution"] == "peanut_oil => olive_oil") return s["index"].get<std::size_t>();
  return std::nullopt;
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::kIllegalState), 409);
  EXPECT_EQ(http_status(ErrorCode::kNotFound), 404);
  EXPECT_EQ(http_status(ErrorCode::kIoError), 500);
  EXPECT_EQ(http_status(ErrorCode::kUnknownAtom), 400);
}

TEST_F(Router, HealthAndCases) {
  const Response h = call("GET", "/healthz");
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(h.body["cases"], testing::scenario_casebase()->size());
  EXPECT_EQ(h.body["akbVersion"], 0);
  const Response c = call("GET", "/cases/wonton_soup");
  EXPECT_EQ(c.status, 200);
  EXPECT_EQ(c.body["title"], "Wonton Soup");
  EXPECT_EQ(call("GET", "/cases/nothing").status, 404);
  EXPECT_EQ(call("GET", "/nowhere").status, 404);
  EXPECT_EQ(call("DELETE", "/akb").status, 405);
}

TEST_F(Router, FullRepairOverJson) {
  const std::string id = repair_configured();
  const Response mined = call("POST", "/sessions/" + id + "/mine", {{"minSupport", 0.2}});
  ASSERT_EQ(mined.status, 200) << mined.body.dump();
  EXPECT_EQ(mined.body["state"], "SuggestionsReady");
  EXPECT_EQ(mined.body["seed"], (Json{"oil=", "peanut_oil-"}));
  const auto pick = olive_oil(mined.body);
  ASSERT_TRUE(pick);
  const Response sel = call("POST", "/sessions/" + id + "/select", {{"index", *pick}});
  ASSERT_EQ(sel.status, 200) << sel.body.dump();
  EXPECT_EQ(sel.body["selection"]["substitution"], "peanut_oil => olive_oil");
  const Response val = call("POST", "/sessions/" + id + "/validate", {{"decision", "accept"}});
  ASSERT_EQ(val.status, 200) << val.body.dump();
  EXPECT_EQ(val.body["state"], "Completed");
  EXPECT_EQ(val.body["stored"]["provenance"]["validator"], "anonymous");

  const Response akb = call("GET", "/akb");
  EXPECT_EQ(akb.body["version"], 1);
  EXPECT_EQ(akb.body["entries"][0]["r"], "peanut_oil => olive_oil");

  const Response log = call("GET", "/sessions/" + id + "/log");
  ASSERT_EQ(log.status, 200);
  EXPECT_EQ(log.body["events"].size(), 8u);
  EXPECT_EQ(log.body["events"][0]["event"], "created");
  EXPECT_EQ(log.body["events"][7]["payload"]["decision"], "accept");
}

TEST_F(Router, ErrorsCarryCodesAndState) {
  const std::string id = create();
  const Response early = call("POST", "/sessions/" + id + "/select", {{"index", 0}});
  EXPECT_EQ(early.status, 409);
  EXPECT_EQ(early.body["error"], "illegal_state");
  EXPECT_EQ(early.body["state"], "AwaitingQuery");

  const Response bad = call("POST", "/sessions/" + id + "/query", {{"want", {"durian"}}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["error"], "unknown_atom");

  EXPECT_EQ(service_.handle("POST", "/sessions/" + id + "/query", "{oops").status, 400);
  EXPECT_EQ(call("POST", "/sessions/" + id + "/query", {{"want", "leek"}}).status, 400);
  EXPECT_EQ(call("GET", "/sessions/ffffffffffffffff").status, 404);
  EXPECT_EQ(call("POST", "/sessions/ffffffffffffffff/query", {{"want", {"leek"}}}).status, 404);
  EXPECT_EQ(call("POST", "/sessions/" + id + "/repair", {{"strategy", "guess"}}).status, 400);
}

TEST_F(Router, SelectOutOfRangeIsABadRequest) {
  const std::string id = repair_configured();
  const Response mined = call("POST", "/sessions/" + id + "/mine", {{"minSupport", 0.2}});
  ASSERT_EQ(mined.status, 200);
  const Response r = call("POST", "/sessions/" + id + "/select",
                          {{"index", mined.body["suggestions"].size()}});
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["state"], "SuggestionsReady");
  EXPECT_EQ(call("POST", "/sessions/" + id + "/select", {{"index", -1}}).status, 400);
}

TEST_F(Router, NoPathIsReportedOnTheSession) {
  const std::string id = create();
  const Response r = call("POST", "/sessions/" + id + "/query",
                          {{"want", {"feta", "wonton_wrapper", "honey", "coconut_milk"}}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["state"], "AwaitingQuery");
  EXPECT_EQ(r.body["failure"]["code"], "no_path");
}

TEST(RouterPolling, SlowMiningAnswersWithAPollToken) {
  ServiceOptions o = quick_options();
  o.mining_wait_ms = 0;
  Service service(testing::scenario_engine(), o);
  const auto id = service.handle("POST", "/sessions", "").body["id"].get<std::string>();
  service.handle("POST", "/sessions/" + id + "/query",
                 R"({"want":["chinese","soup","leek"],"dontWant":["peanut_oil"]})");
  service.handle("POST", "/sessions/" + id + "/feedback", R"({"kind":"missing_ingredient"})");
  service.handle("POST", "/sessions/" + id + "/repair", R"({"strategy":"replace_within_parent"})");
  const Response first = service.handle("POST", "/sessions/" + id + "/mine", "{}");
  Response r = first;
  if (first.status == 202) {
    EXPECT_EQ(first.body["status"], "running");
    const std::string token = first.body["pollToken"];
    for (int i = 0; i < 600 && r.status == 202; ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      r = service.handle("GET", "/jobs/" + token, "");
    }
  }
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["state"], "SuggestionsReady");
  EXPECT_TRUE(olive_oil(r.body).has_value());
  EXPECT_EQ(service.handle("GET", "/jobs/unknown", "").status, 404);
}

TEST(ServiceLogs, EveryChangeIsAppendedToTheSessionLog) {
  const fs::path dir = fs::temp_directory_path() / "adaptforge-service-logs";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ServiceOptions o = quick_options();
  o.log_dir = dir.string();
  Service service(testing::scenario_engine(), o);
  const auto id = service.handle("POST", "/sessions", "").body["id"].get<std::string>();
  EXPECT_EQ(id.size(), 16u);
  service.handle("POST", "/sessions/" + id + "/query", R"({"want":["chinese","soup"]})");
  const auto events = parse_event_log(read_file(dir / (id + ".jsonl")));
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].event, "query");
  EXPECT_EQ(events[1].session_id, id);
  fs::remove_all(dir);
}

TEST(ServiceHttp, ServesOverALoopbackSocket) {
  Service service(testing::scenario_engine(), quick_options());
  const int port = service.bind_ephemeral("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { service.serve_bound(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(Json::parse(health->body)["status"], "ok");
  auto created = client.Post("/sessions", "", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = Json::parse(created->body)["id"];
  auto queried = client.Post("/sessions/" + id + "/query",
                             R"({"want":["chinese","soup","leek"],"dontWant":["peanut_oil"]})",
                             "application/json");
  ASSERT_TRUE(queried);
  EXPECT_EQ(queried->status, 200);
  const Json body = Json::parse(queried->body);
  EXPECT_EQ(body["retrieved"], "wonton_soup");
  EXPECT_EQ(body["adaptationPath"].size(), 2u);
  auto conflict = client.Post("/sessions/" + id + "/validate", R"({"decision":"accept"})",
                              "application/json");
  ASSERT_TRUE(conflict);
  EXPECT_EQ(conflict->status, 409);
  service.stop();
  loop.join();
}

}  // namespace
}  // namespace adaptforge
