#include "adaptforge/session.hpp"

#include <chrono>
#include <ctime>
#include <cstdio>

#include "adaptforge/error.hpp"

namespace adaptforge {

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::kAwaitingQuery: return "AwaitingQuery";
    case SessionState::kRetrieved: return "Retrieved";
    case SessionState::kCandidateProposed: return "CandidateProposed";
    case SessionState::kDiagnosing: return "Diagnosing";
    case SessionState::kRepairConfigured: return "RepairConfigured";
    case SessionState::kSuggestionsReady: return "SuggestionsReady";
    case SessionState::kCompleted: return "Completed";
  }
  return "unknown";
}

std::string_view to_string(Feedback::Kind k) {
  switch (k) {
    case Feedback::Kind::kAccept: return "accept";
    case Feedback::Kind::kMissingIngredient: return "missing_ingredient";
    case Feedback::Kind::kStepInvalid: return "step_invalid";
    case Feedback::Kind::kRefineRequest: return "refine_request";
  }
  return "unknown";
}

Feedback::Kind parse_feedback_kind(std::string_view text) {
  for (auto k : {Feedback::Kind::kAccept, Feedback::Kind::kMissingIngredient,
                 Feedback::Kind::kStepInvalid, Feedback::Kind::kRefineRequest}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown feedback kind '" + std::string(text) + "'");
}

std::string_view to_string(RepairStrategy s) {
  switch (s) {
    case RepairStrategy::kReplaceWithinParent: return "replace_within_parent";
    case RepairStrategy::kRefineCurrent: return "refine_current";
    case RepairStrategy::kExplicit: return "explicit";
  }
  return "unknown";
}

RepairStrategy parse_repair_strategy(std::string_view text) {
  for (auto s : {RepairStrategy::kReplaceWithinParent, RepairStrategy::kRefineCurrent,
                 RepairStrategy::kExplicit}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::kUnknownStrategy, "unknown repair strategy '" + std::string(text) + "'");
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kAccept: return "accept";
    case Decision::kReject: return "reject";
    case Decision::kRejectAll: return "reject_all";
  }
  return "unknown";
}

Decision parse_decision(std::string_view text) {
  for (auto d : {Decision::kAccept, Decision::kReject, Decision::kRejectAll})
    if (text == to_string(d)) return d;
  throw Error(ErrorCode::kInvalidArgument, "unknown decision '" + std::string(text) + "'");
}

std::string to_json_line(const Event& e) {
  nlohmann::ordered_json j;
  j["ts"] = e.ts;
  j["sessionId"] = e.session_id;
  j["event"] = e.event;
  j["payload"] = e.payload;
  return j.dump();
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("ts").get<std::string>(), j.at("sessionId").get<std::string>(),
                     j.at("event").get<std::string>(), j.value("payload", nlohmann::json::object())});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  "event log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string utc_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

DiscoveryResult run_discovery_job(const DiscoveryJob& job) {
  const Ontology& onto = job.cb->ontology();
  DiscoveryResult res;
  res.generation = job.generation;
  res.min_support = job.min_support;
  const TrainingSet t = build_training_set(*job.cb, job.seed, job.pair_cap);
  res.training_size = t.size();
  res.matching_pairs = t.matching_pairs;
  res.truncated = t.truncated;
  if (t.empty()) {
    res.advisory = "no pair of cases matches the seed {" + render(job.seed, onto) +
                   "}; try a more general seed";
    return res;
  }
  const auto mined = mine_closed(t, job.min_support, onto, job.mining);
  res.mined = mined.size();
  res.suggestions = filter_applicable(mined, job.solution, onto);
  if (res.suggestions.empty()) {
    res.advisory = std::to_string(mined.size()) +
                   " variations were mined but none applies to the solution under repair";
  }
  return res;
}

Session::Session(std::string id, Engine engine, Clock clock)
    : id_(std::move(id)), engine_(std::move(engine)), clock_(std::move(clock)) {
  record("created", nlohmann::json::object());
}

void Session::require(std::initializer_list<SessionState> allowed,
                      std::string_view op) const {
  for (auto s : allowed)
    if (s == state_) return;
  throw Error(ErrorCode::kIllegalState, std::string(op) + " is not allowed in state " +
                                            std::string(to_string(state_)));
}

void Session::record(std::string event, nlohmann::json payload, std::string ts) {
  if (ts.empty()) ts = clock_();
  log_.push_back({std::move(ts), id_, std::move(event), std::move(payload)});
}

void Session::submit_query(const Conjunction& tgt) {
  require({SessionState::kAwaitingQuery}, "query");
  const Ontology& onto = engine_.ontology();
  for (const auto& lit : tgt) onto.check_known(lit.atom);
  const auto akb = engine_.akb->snapshot();

  SimilarityPath sp;
  try {
    sp = retrieve(tgt, *engine_.cb, engine_.config.retrieval);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoPath) throw;
    target_ = tgt;
    failure_ = Failure{e.code(), e.what()};
    record("query", {{"tgt", render(tgt, onto)},
                     {"akbEntries", akb->size()},
                     {"failure", to_string(e.code())}});
    return;
  }

  target_ = tgt;
  failure_.reset();
  retrieved_ = engine_.cb->at(sp.retrieved.front());
  sp_ = std::move(sp);
  state_ = SessionState::kRetrieved;
  nlohmann::json payload{{"tgt", render(tgt, onto)}, {"akbEntries", akb->size()}};
  try {
    ap_ = build_adaptation_path(*sp_, *retrieved_, akb->entries(), onto);
    candidate_ = apply_adaptation_path(ap_, *retrieved_, onto);
    state_ = SessionState::kCandidateProposed;
  } catch (const Error& e) {
    failure_ = Failure{e.code(), e.what()};
    payload["failure"] = to_string(e.code());
  }
  record("query", std::move(payload));
}

std::vector<CaseIndex> Session::intermediates() const {
  if (!retrieved_) return {};
  return intermediate_solutions(ap_, *retrieved_, engine_.ontology());
}

void Session::feedback(const Feedback& fb) {
  require({SessionState::kCandidateProposed}, "feedback");
  if (fb.kind != Feedback::Kind::kAccept && ap_.empty()) {
    throw Error(ErrorCode::kIllegalState,
                "the candidate is a retrieved case unchanged; there is no step to repair");
  }
  if (fb.kind == Feedback::Kind::kStepInvalid && fb.step >= ap_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "step " + std::to_string(fb.step) + " is outside the adaptation path of " +
                    std::to_string(ap_.size()) + " steps");
  }
  switch (fb.kind) {
    case Feedback::Kind::kAccept:
      state_ = SessionState::kCompleted;
      break;
    case Feedback::Kind::kMissingIngredient:
      state_ = SessionState::kDiagnosing;
      break;
    case Feedback::Kind::kStepInvalid:
      culprit_ = fb.step;
      state_ = SessionState::kDiagnosing;
      break;
    case Feedback::Kind::kRefineRequest:
      refine_active_ = true;
      state_ = SessionState::kDiagnosing;
      break;
  }
  nlohmann::json payload{{"kind", to_string(fb.kind)}, {"note", fb.note}};
  if (fb.kind == Feedback::Kind::kStepInvalid) payload["step"] = fb.step;
  record("feedback", std::move(payload));
}

std::optional<std::size_t> Session::diagnose(const std::vector<bool>& verdicts) {
  require({SessionState::kDiagnosing}, "diagnose");
  if (verdicts.size() != ap_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(ap_.size()) + " verdicts, got " +
                    std::to_string(verdicts.size()));
  }
  std::optional<std::size_t> first_bad;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (!verdicts[i] && !first_bad) first_bad = i;
    if (verdicts[i] && first_bad) {
      throw Error(ErrorCode::kInconsistentVerdicts,
                  "step " + std::to_string(i) + " is judged valid after step " +
                      std::to_string(*first_bad) + " was judged invalid");
    }
  }
  culprit_ = first_bad;
  if (!first_bad) {
    refine_active_ = false;
    state_ = SessionState::kCandidateProposed;
  }
  record("diagnose", {{"verdicts", verdicts}});
  return first_bad;
}

std::size_t Session::repair_step() const {
  if (culprit_) return *culprit_;
  return ap_.size() - 1;
}

CaseIndex Session::solution_under_repair() const {
  if (!retrieved_ || ap_.empty())
    throw Error(ErrorCode::kIllegalState, "no adaptation step to repair");
  return intermediates().at(repair_step());
}

const Variation& Session::configure_repair(const RepairChoice& choice) {
  require({SessionState::kDiagnosing, SessionState::kRepairConfigured,
           SessionState::kSuggestionsReady},
          "repair");
  if (ap_.empty()) throw Error(ErrorCode::kIllegalState, "no adaptation step to repair");
  const Ontology& onto = engine_.ontology();
  const std::size_t step = choice.step ? *choice.step : repair_step();
  if (step >= ap_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "step " + std::to_string(step) + " is outside the adaptation path");
  }
  const SolutionSubstitution& r = ap_.steps[step];

  Variation seed;
  switch (choice.strategy) {
    case RepairStrategy::kReplaceWithinParent: {
      const AtomSet removed = r.to.negatives();
      if (removed.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "step '" + render(r, onto) + "' removes nothing; replace_within_parent "
                    "needs a removal step");
      }
      // First removed atom by name.
      Atom x = *removed.begin();
      for (Atom a : removed)
        if (onto.name(a) < onto.name(x)) x = a;
      Atom parent;
      if (choice.parent) {
        parent = onto.atom(*choice.parent);
        if (parent == x || !onto.ancestors(x).contains(parent)) {
          throw Error(ErrorCode::kNoParent,
                      "'" + *choice.parent + "' is not an ancestor of '" + onto.name(x) + "'");
        }
      } else {
        const auto& parents = onto.parents(x);
        if (parents.empty())
          throw Error(ErrorCode::kNoParent, "'" + onto.name(x) + "' has no parent");
        parent = parents.front();
      }
      seed = Variation({{parent, Marker::kEqual}, {x, Marker::kMinus}});
      break;
    }
    case RepairStrategy::kRefineCurrent: {
      const AtomSet a = r.from.positives();
      const AtomSet b = r.to.positives();
      std::vector<VariationProperty> props;
      for (Atom x : a) props.push_back({x, b.contains(x) ? Marker::kEqual : Marker::kMinus});
      for (Atom x : b)
        if (!a.contains(x)) props.push_back({x, Marker::kPlus});
      for (Atom x : r.to.negatives())
        if (!a.contains(x)) props.push_back({x, Marker::kMinus});
      seed = Variation(std::move(props));
      break;
    }
    case RepairStrategy::kExplicit:
      seed = parse_seed(choice.seed, onto);
      break;
  }

  culprit_ = step;
  strategy_ = choice.strategy;
  seed_ = std::move(seed);
  ++generation_;
  discovery_.reset();
  suggestions_.clear();
  selection_.reset();
  diagnostics_.clear();
  state_ = SessionState::kRepairConfigured;

  nlohmann::json payload{{"strategy", to_string(choice.strategy)},
                         {"step", step},
                         {"seed", render(*seed_, onto)}};
  if (choice.parent) payload["parent"] = *choice.parent;
  record("repair", std::move(payload));
  return *seed_;
}

DiscoveryJob Session::prepare_discovery(std::optional<double> min_support) const {
  require({SessionState::kRepairConfigured, SessionState::kSuggestionsReady}, "mine");
  DiscoveryJob job;
  job.cb = engine_.cb;
  job.seed = *seed_;
  job.solution = solution_under_repair();
  job.min_support = min_support.value_or(engine_.config.min_support);
  if (!(job.min_support > 0.0 && job.min_support <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "support threshold must lie in (0, 1], got " +
                                                 std::to_string(job.min_support));
  }
  job.pair_cap = engine_.config.pair_cap;
  job.mining = engine_.config.mining;
  job.generation = generation_;
  return job;
}

void Session::commit_discovery(DiscoveryResult result) {
  require({SessionState::kRepairConfigured, SessionState::kSuggestionsReady}, "mine");
  if (result.generation != generation_) {
    throw Error(ErrorCode::kIllegalState,
                "the repair seed changed while mining ran; mine again");
  }
  suggestions_ = result.suggestions;
  nlohmann::json payload{{"minSupport", result.min_support},
                         {"trainingSize", result.training_size},
                         {"suggestions", suggestions_.size()}};
  discovery_ = std::move(result);
  selection_.reset();
  diagnostics_.clear();
  state_ = SessionState::kSuggestionsReady;
  record("mine", std::move(payload));
}

const std::vector<MinedVariation>& Session::run_discovery(std::optional<double> min_support) {
  commit_discovery(run_discovery_job(prepare_discovery(min_support)));
  return suggestions_;
}

std::vector<std::size_t> Session::refinement_indices(std::size_t index) const {
  if (index >= suggestions_.size())
    throw Error(ErrorCode::kInvalidArgument, "no suggestion " + std::to_string(index));
  std::vector<std::size_t> out;
  const Variation& base = suggestions_[index].variation;
  for (std::size_t i = 0; i < suggestions_.size(); ++i) {
    const Variation& v = suggestions_[i].variation;
    if (v.size() > base.size() && v.includes(base)) out.push_back(i);
  }
  return out;
}

bool Session::select(std::size_t index) {
  require({SessionState::kSuggestionsReady}, "select");
  if (index >= suggestions_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "suggestion index " + std::to_string(index) + " is out of range (" +
                    std::to_string(suggestions_.size()) + " suggestions)");
  }
  const Ontology& onto = engine_.ontology();
  const SolutionSubstitution r = interpret(suggestions_[index].variation, onto);
  AdaptationPath ap = ap_;
  ap.steps[*culprit_] = r;
  ap.origins[*culprit_] = StepOrigin::kUser;

  std::vector<std::string> problems;
  std::optional<CaseIndex> cand;
  try {
    cand = apply_adaptation_path(ap, *retrieved_, onto);
    if (!entails_cw(*cand, *target_, onto)) {
      problems.push_back("the repaired candidate no longer satisfies " +
                         render(*target_, onto));
    }
  } catch (const Error& e) {
    problems.push_back(e.what());
  }

  nlohmann::json payload{{"index", index}, {"substitution", render(r, onto)}};
  if (problems.empty()) {
    selection_ = Selection{index, r};
    proposed_ap_ = std::move(ap);
    proposed_candidate_ = std::move(cand);
    diagnostics_.clear();
  } else {
    selection_.reset();
    proposed_candidate_.reset();
    diagnostics_ = problems;
    payload["diagnostics"] = problems;
  }
  record("select", std::move(payload));
  return problems.empty();
}

void Session::validate(Decision decision, const std::string& validator) {
  require({SessionState::kSuggestionsReady}, "validate");
  if (decision != Decision::kRejectAll && !selection_) {
    throw Error(ErrorCode::kIllegalState, "select a suggestion before validating it");
  }
  const std::string ts = clock_();
  const Ontology& onto = engine_.ontology();
  nlohmann::json payload{{"decision", to_string(decision)}, {"validator", validator}};
  switch (decision) {
    case Decision::kAccept: {
      const std::size_t q_index = mirrored_query_step(*culprit_, sp_->steps.size());
      Reformulation ref{sp_->steps[q_index], selection_->substitution,
                        Provenance{id_, ts, validator}};
      const bool added = engine_.akb->add(ref);
      payload["q"] = render(ref.q, onto);
      payload["r"] = render(ref.r, onto);
      payload["added"] = added;
      stored_ = std::move(ref);
      ap_ = std::move(proposed_ap_);
      candidate_ = std::move(proposed_candidate_);
      state_ = SessionState::kCompleted;
      break;
    }
    case Decision::kReject:
      selection_.reset();
      proposed_candidate_.reset();
      break;
    case Decision::kRejectAll:
      selection_.reset();
      proposed_candidate_.reset();
      suggestions_.clear();
      discovery_.reset();
      state_ = SessionState::kRepairConfigured;
      break;
  }
  record("validate", std::move(payload), ts);
}

Session replay(const std::vector<Event>& events, const Engine& engine,
               const AdaptationKnowledgeBase& akb_history) {
  if (events.empty() || events.front().event != "created")
    throw Error(ErrorCode::kParseError, "a session log starts with a 'created' event");
  auto now = std::make_shared<std::string>(events.front().ts);
  Engine local = engine;
  local.akb = std::make_shared<AkbStore>(engine.cb->ontology_ptr(), AdaptationKnowledgeBase{});
  Session s(events.front().session_id, local, [now] { return *now; });
  const Ontology& onto = engine.ontology();

  for (std::size_t i = 1; i < events.size(); ++i) {
    const Event& e = events[i];
    *now = e.ts;
    const auto& p = e.payload;
    try {
      if (e.event == "query") {
        const std::size_t n = p.at("akbEntries").get<std::size_t>();
        s.engine_.akb = std::make_shared<AkbStore>(engine.cb->ontology_ptr(),
                                                   akb_history.prefix(n));
        s.submit_query(parse_conjunction(p.at("tgt").get<std::string>(), onto));
      } else if (e.event == "feedback") {
        Feedback fb;
        fb.kind = parse_feedback_kind(p.at("kind").get<std::string>());
        fb.step = p.value("step", std::size_t{0});
        fb.note = p.value("note", "");
        s.feedback(fb);
      } else if (e.event == "diagnose") {
        s.diagnose(p.at("verdicts").get<std::vector<bool>>());
      } else if (e.event == "repair") {
        RepairChoice c;
        c.strategy = parse_repair_strategy(p.at("strategy").get<std::string>());
        c.step = p.at("step").get<std::size_t>();
        if (p.contains("parent")) c.parent = p["parent"].get<std::string>();
        c.seed = p.at("seed").get<std::string>();
        s.configure_repair(c);
      } else if (e.event == "mine") {
        s.run_discovery(p.at("minSupport").get<double>());
      } else if (e.event == "select") {
        s.select(p.at("index").get<std::size_t>());
      } else if (e.event == "validate") {
        s.validate(parse_decision(p.at("decision").get<std::string>()),
                   p.at("validator").get<std::string>());
      } else {
        throw Error(ErrorCode::kParseError, "unknown event '" + e.event + "'");
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::kParseError,
                  "event " + std::to_string(i) + " (" + e.event + "): " + ex.what());
    }
  }
  return s;
}

}  // namespace adaptforge
