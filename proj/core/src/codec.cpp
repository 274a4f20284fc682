#include "adaptforge/codec.hpp"

#include <algorithm>

#include "adaptforge/error.hpp"

namespace adaptforge::codec {

std::vector<std::string> names(const AtomSet& atoms, const Ontology& onto) {
  std::vector<std::string> out;
  out.reserve(atoms.size());
  for (Atom a : atoms) out.push_back(onto.name(a));
  std::sort(out.begin(), out.end());
  return out;
}

Json to_json(const CaseIndex& c, const Ontology& onto) {
  Json j;
  j["id"] = c.id;
  j["title"] = c.title;
  j["atoms"] = names(c.atoms, onto);
  j["closure"] = names(c.closure, onto);
  return j;
}

Json to_json(const SimilarityPath& sp, const Ontology& onto) {
  Json j;
  j["target"] = render(sp.target, onto);
  j["steps"] = Json::array();
  for (const auto& s : sp.steps) j["steps"].push_back(render(s, onto));
  j["source"] = render(sp.source, onto);
  j["retrieved"] = sp.retrieved;
  j["cost"] = sp.cost;
  return j;
}

Json to_json(const AdaptationPath& ap, const Ontology& onto) {
  Json j = Json::array();
  for (std::size_t i = 0; i < ap.size(); ++i) {
    j.push_back({{"substitution", render(ap.steps[i], onto)},
                 {"origin", to_string(ap.origins[i])}});
  }
  return j;
}

Json to_json(const MinedVariation& m, const Ontology& onto) {
  Json j;
  j["properties"] = render_properties(m.variation, onto);
  j["support"] = m.support;
  j["count"] = m.count;
  try {
    j["substitution"] = render(interpret(m.variation, onto), onto);
  } catch (const Error&) {
    j["substitution"] = nullptr;
  }
  return j;
}

Json to_json(const std::vector<MinedVariation>& ms, const Ontology& onto) {
  Json j = Json::array();
  for (const auto& m : ms) j.push_back(to_json(m, onto));
  return j;
}

Json to_json(const Reformulation& r, const Ontology& onto) {
  return {{"q", render(r.q, onto)},
          {"r", render(r.r, onto)},
          {"provenance",
           {{"sessionId", r.provenance.session_id},
            {"timestamp", r.provenance.timestamp},
            {"validator", r.provenance.validator}}}};
}

Json to_json(const Session& s) {
  const Ontology& onto = s.engine().ontology();
  Json j;
  j["id"] = s.id();
  j["state"] = to_string(s.state());
  j["target"] = s.target() ? Json(render(*s.target(), onto)) : Json(nullptr);
  if (s.failure()) {
    j["failure"] = {{"code", to_string(s.failure()->code)}, {"message", s.failure()->message}};
  }
  if (s.similarity_path()) j["similarityPath"] = to_json(*s.similarity_path(), onto);
  if (s.retrieved()) {
    j["retrieved"] = s.retrieved()->id;
    j["adaptationPath"] = to_json(s.adaptation_path(), onto);
    Json inter = Json::array();
    try {
      for (const auto& c : s.intermediates()) inter.push_back(names(c.atoms, onto));
    } catch (const Error&) {
    }
    j["intermediates"] = std::move(inter);
  }
  if (s.candidate()) j["candidate"] = to_json(*s.candidate(), onto);
  if (s.culprit()) j["culprit"] = *s.culprit();
  j["refineActive"] = s.refine_active();
  if (s.strategy()) j["strategy"] = to_string(*s.strategy());
  if (s.seed()) j["seed"] = render_properties(*s.seed(), onto);
  if (s.discovery()) {
    const auto& d = *s.discovery();
    j["discovery"] = {{"minSupport", d.min_support},
                      {"trainingSize", d.training_size},
                      {"matchingPairs", d.matching_pairs},
                      {"truncated", d.truncated},
                      {"mined", d.mined}};
    if (d.advisory) j["advisory"] = *d.advisory;
  }
  Json sugg = Json::array();
  for (std::size_t i = 0; i < s.suggestions().size(); ++i) {
    Json e = to_json(s.suggestions()[i], onto);
    e["index"] = i;
    e["refinements"] = s.refinement_indices(i);
    sugg.push_back(std::move(e));
  }
  j["suggestions"] = std::move(sugg);
  if (s.selection()) {
    j["selection"] = {{"index", s.selection()->index},
                      {"substitution", render(s.selection()->substitution, onto)}};
    if (s.proposed_candidate())
      j["selection"]["candidate"] = to_json(*s.proposed_candidate(), onto);
  }
  if (!s.diagnostics().empty()) j["diagnostics"] = s.diagnostics();
  if (s.stored()) j["stored"] = to_json(*s.stored(), onto);
  return j;
}

Conjunction make_query(const std::vector<std::string>& want,
                       const std::vector<std::string>& dont_want, const Ontology& onto) {
  Conjunction q;
  for (const auto& n : want) q.insert(Literal::pos(onto.atom(n)));
  for (const auto& n : dont_want) {
    const Literal lit = Literal::neg(onto.atom(n));
    if (q.contains(lit.negated())) {
      throw Error(ErrorCode::kInvalidArgument, "'" + n + "' is both wanted and unwanted");
    }
    q.insert(lit);
  }
  return q;
}

}  // namespace adaptforge::codec
