#pragma once

// Interactive repair workflow. A session retrieves and adapts a case for a
// query, lets the user point at the step that went wrong, mines the case
// base for a better substitution and stores the validated result.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptforge/adaptation.hpp"
#include "adaptforge/akb.hpp"
#include "adaptforge/akdiscovery.hpp"
#include "adaptforge/casebase.hpp"
#include "adaptforge/error.hpp"
#include "adaptforge/retrieval.hpp"

namespace adaptforge {

struct EngineConfig {
  RetrievalConfig retrieval;
  double min_support = kDefaultMinSupport;
  std::size_t pair_cap = kDefaultPairCap;
  MiningConfig mining;
};

/// Shared, immutable context of every session: corpus, AKB owner, settings.
struct Engine {
  std::shared_ptr<const CaseBase> cb;
  std::shared_ptr<AkbStore> akb;
  EngineConfig config;

  const Ontology& ontology() const { return cb->ontology(); }
};

enum class SessionState {
  kAwaitingQuery,
  kRetrieved,
  kCandidateProposed,
  kDiagnosing,
  kRepairConfigured,
  kSuggestionsReady,
  kCompleted,
};

std::string_view to_string(SessionState s);

struct Feedback {
  enum class Kind { kAccept, kMissingIngredient, kStepInvalid, kRefineRequest };
  Kind kind = Kind::kAccept;
  std::size_t step = 0;  // kStepInvalid only
  std::string note;
};

std::string_view to_string(Feedback::Kind k);
/// `accept`, `missing_ingredient`, `step_invalid`, `refine_request`.
Feedback::Kind parse_feedback_kind(std::string_view text);

enum class RepairStrategy { kReplaceWithinParent, kRefineCurrent, kExplicit };

std::string_view to_string(RepairStrategy s);
/// `replace_within_parent`, `refine_current`, `explicit`; kUnknownStrategy
/// otherwise.
RepairStrategy parse_repair_strategy(std::string_view text);

struct RepairChoice {
  RepairStrategy strategy = RepairStrategy::kRefineCurrent;
  /// Step to repair; defaults to the culprit, then to the last step.
  std::optional<std::size_t> step;
  /// kReplaceWithinParent: which ancestor to keep; defaults to the first
  /// direct parent by name.
  std::optional<std::string> parent;
  /// kExplicit: the seed in `atom-,atom+,atom=` form.
  std::string seed;
};

enum class Decision { kAccept, kReject, kRejectAll };

std::string_view to_string(Decision d);
Decision parse_decision(std::string_view text);

struct Event {
  std::string ts;
  std::string session_id;
  std::string event;
  nlohmann::json payload;
};

std::string to_json_line(const Event& e);
/// One event per non-blank line.
std::vector<Event> parse_event_log(std::string_view text);

struct Failure {
  ErrorCode code;
  std::string message;
};

/// Everything a mining run needs, detached from the session so the run can
/// happen off the session's lock.
struct DiscoveryJob {
  std::shared_ptr<const CaseBase> cb;
  Variation seed;
  CaseIndex solution;
  double min_support = kDefaultMinSupport;
  std::size_t pair_cap = kDefaultPairCap;
  MiningConfig mining;
  std::uint64_t generation = 0;
};

struct DiscoveryResult {
  std::size_t training_size = 0;
  std::size_t matching_pairs = 0;
  bool truncated = false;
  std::size_t mined = 0;
  std::vector<MinedVariation> suggestions;
  std::optional<std::string> advisory;
  double min_support = 0.0;
  std::uint64_t generation = 0;
};

DiscoveryResult run_discovery_job(const DiscoveryJob& job);

struct Selection {
  std::size_t index = 0;
  SolutionSubstitution substitution;
};

using Clock = std::function<std::string()>;

/// UTC, ISO 8601 with milliseconds.
std::string utc_now();

class Session {
 public:
  Session(std::string id, Engine engine, Clock clock = utc_now);

  const std::string& id() const { return id_; }
  SessionState state() const { return state_; }
  const Engine& engine() const { return engine_; }

  // Query and candidate.
  void submit_query(const Conjunction& tgt);
  const std::optional<Conjunction>& target() const { return target_; }
  const std::optional<SimilarityPath>& similarity_path() const { return sp_; }
  const std::optional<CaseIndex>& retrieved() const { return retrieved_; }
  const AdaptationPath& adaptation_path() const { return ap_; }
  const std::optional<CaseIndex>& candidate() const { return candidate_; }
  const std::optional<Failure>& failure() const { return failure_; }
  /// Solutions before and after each adaptation step.
  std::vector<CaseIndex> intermediates() const;

  // Testing the candidate.
  void feedback(const Feedback& fb);
  /// verdicts[i] judges the solution after step i. Returns the culprit, or
  /// nothing when every step was judged valid.
  std::optional<std::size_t> diagnose(const std::vector<bool>& verdicts);
  const std::optional<std::size_t>& culprit() const { return culprit_; }
  bool refine_active() const { return refine_active_; }

  // Repair.
  const Variation& configure_repair(const RepairChoice& choice);
  const std::optional<Variation>& seed() const { return seed_; }
  const std::optional<RepairStrategy>& strategy() const { return strategy_; }
  /// Solution fed into the step under repair.
  CaseIndex solution_under_repair() const;

  DiscoveryJob prepare_discovery(std::optional<double> min_support = std::nullopt) const;
  void commit_discovery(DiscoveryResult result);
  /// prepare + run + commit in one call.
  const std::vector<MinedVariation>& run_discovery(
      std::optional<double> min_support = std::nullopt);
  const std::vector<MinedVariation>& suggestions() const { return suggestions_; }
  const std::optional<DiscoveryResult>& discovery() const { return discovery_; }
  /// Positions in suggestions() strictly more specific than suggestion `index`.
  std::vector<std::size_t> refinement_indices(std::size_t index) const;

  /// Swaps the repaired step for the chosen suggestion and re-applies the
  /// path. Returns false, with diagnostics, when the result no longer applies
  /// or no longer answers the query.
  bool select(std::size_t index);
  const std::optional<Selection>& selection() const { return selection_; }
  /// Candidate the current selection would produce.
  const std::optional<CaseIndex>& proposed_candidate() const { return proposed_candidate_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  void validate(Decision decision, const std::string& validator);
  /// The reformulation stored by an accepted validation.
  const std::optional<Reformulation>& stored() const { return stored_; }

  const std::vector<Event>& log() const { return log_; }

 private:
  friend Session replay(const std::vector<Event>& events, const Engine& engine,
                        const AdaptationKnowledgeBase& akb_history);

  void require(std::initializer_list<SessionState> allowed, std::string_view op) const;
  void record(std::string event, nlohmann::json payload, std::string ts = {});
  std::size_t repair_step() const;

  std::string id_;
  Engine engine_;
  Clock clock_;
  SessionState state_ = SessionState::kAwaitingQuery;

  std::optional<Conjunction> target_;
  std::optional<SimilarityPath> sp_;
  std::optional<CaseIndex> retrieved_;
  AdaptationPath ap_;
  std::optional<CaseIndex> candidate_;
  std::optional<Failure> failure_;

  std::optional<std::size_t> culprit_;
  bool refine_active_ = false;
  std::optional<RepairStrategy> strategy_;
  std::optional<Variation> seed_;
  std::uint64_t generation_ = 0;

  std::optional<DiscoveryResult> discovery_;
  std::vector<MinedVariation> suggestions_;
  std::optional<Selection> selection_;
  AdaptationPath proposed_ap_;
  std::optional<CaseIndex> proposed_candidate_;
  std::vector<std::string> diagnostics_;
  std::optional<Reformulation> stored_;

  std::vector<Event> log_;
};

/// Re-runs a logged session. Each query sees the first `akbEntries` entries
/// of `akb_history`, timestamps come from the log, and an accepted
/// validation lands in a private store, so the returned session's stored()
/// matches the original entry exactly.
Session replay(const std::vector<Event>& events, const Engine& engine,
               const AdaptationKnowledgeBase& akb_history);

}  // namespace adaptforge
