#pragma once

#include <memory>

#include "adaptforge/config.hpp"
#include "adaptforge/error.hpp"
#include "adaptforge/session.hpp"
#include "oracles.hpp"

namespace adaptforge::testing {

inline std::shared_ptr<const Ontology> scenario_ontology() {
  static const auto onto = std::make_shared<const Ontology>(
      load_ontology(read_file(data_path("scenario/ontology.txt"))));
  return onto;
}

inline std::shared_ptr<const CaseBase> scenario_casebase() {
  static const auto cb = std::make_shared<const CaseBase>(
      ingest(read_file(data_path("scenario/corpus.jsonl")), scenario_ontology()));
  return cb;
}

/// Scenario corpus with a fresh in-memory knowledge base.
inline Engine scenario_engine() {
  Engine e;
  e.cb = scenario_casebase();
  e.akb = std::make_shared<AkbStore>(e.cb->ontology_ptr(), AdaptationKnowledgeBase{});
  return e;
}

inline Conjunction q(std::string_view text) {
  return parse_conjunction(text, *scenario_ontology());
}

inline Atom atom(std::string_view name) { return scenario_ontology()->atom(name); }

/// Deterministic clock: 2024-01-01T00:00:00.000Z, then one second per call.
inline Clock counting_clock() {
  auto n = std::make_shared<int>(0);
  return [n] {
    char buf[32];
    const int s = (*n)++;
    std::snprintf(buf, sizeof buf, "2024-01-01T00:%02d:%02d.000Z", (s / 60) % 60, s % 60);
    return std::string(buf);
  };
}

}  // namespace adaptforge::testing

#define EXPECT_ERROR_CODE(stmt, expected)                                   \
  do {                                                                      \
    try {                                                                   \
      stmt;                                                                 \
      ADD_FAILURE() << "expected " << ::adaptforge::to_string(expected);    \
    } catch (const ::adaptforge::Error& e_) {                               \
      EXPECT_EQ(e_.code(), expected) << e_.what();                          \
    }                                                                       \
  } while (0)
