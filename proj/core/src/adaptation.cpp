#include "adaptforge/adaptation.hpp"

#include <algorithm>

#include "adaptforge/error.hpp"

namespace adaptforge {

std::string render(const SolutionSubstitution& r, const Ontology& onto) {
  return render(r.from, onto) + " => " + render(r.to, onto);
}

SolutionSubstitution parse_solution_substitution(std::string_view text,
                                                 const Ontology& onto) {
  const auto arrow = text.find("=>");
  if (arrow == std::string_view::npos) {
    throw Error(ErrorCode::kParseError,
                "expected 'A => B', got '" + std::string(text) + "'");
  }
  SolutionSubstitution r{parse_conjunction(text.substr(0, arrow), onto),
                         parse_conjunction(text.substr(arrow + 2), onto)};
  if (r.from.empty() && r.to.empty()) {
    throw Error(ErrorCode::kParseError, "both sides of '" + std::string(text) +
                                            "' are empty");
  }
  return r;
}

std::string_view to_string(StepOrigin origin) {
  switch (origin) {
    case StepOrigin::kAkb: return "akb";
    case StepOrigin::kGenerated: return "generated";
    case StepOrigin::kSpecialized: return "specialized";
    case StepOrigin::kUser: return "user";
  }
  return "unknown";
}

SolutionSubstitution auto_generate(const QuerySubstitution& s) {
  if (s.kind == QuerySubstitution::Kind::kDropNegative)
    return {Conjunction{}, Conjunction{Literal::neg(s.from)}};
  return {Conjunction{Literal::pos(s.to)}, Conjunction{Literal::pos(s.from)}};
}

std::vector<SolutionSubstitution> specialize(const SolutionSubstitution& r,
                                             const CaseIndex& sol,
                                             const Ontology& onto) {
  if (r.from.size() != 1 || !r.from.begin()->positive()) return {r};
  const Atom b = r.from.begin()->atom;
  std::vector<std::pair<std::string, Atom>> hits;
  for (Atom c : sol.atoms)
    if (onto.ancestors(c).contains(b)) hits.emplace_back(onto.name(c), c);
  if (hits.empty()) return {r};
  std::sort(hits.begin(), hits.end());
  std::vector<SolutionSubstitution> out;
  for (const auto& [_, c] : hits)
    out.push_back({Conjunction{Literal::pos(c)}, r.to});
  return out;
}

std::vector<std::size_t> akb_matches(const QuerySubstitution& s,
                                     std::span<const Reformulation> akb,
                                     const Ontology& onto) {
  const Conjunction alpha{s.alpha()};
  const Conjunction beta = s.beta();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < akb.size(); ++i) {
    const auto& entry = akb[i];
    if (entry.q == s || (entails_open(entry.r.from, beta, onto) &&
                         entails_open(entry.r.to, alpha, onto))) {
      out.push_back(i);
    }
  }
  return out;
}

std::optional<SolutionSubstitution> akb_lookup(const QuerySubstitution& s,
                                               std::span<const Reformulation> akb,
                                               const Ontology& onto) {
  auto hits = akb_matches(s, akb, onto);
  if (hits.empty()) return std::nullopt;
  return akb[hits.front()].r;
}

bool applicable(const SolutionSubstitution& r, const CaseIndex& sol,
                const Ontology& onto) {
  return entails_cw(sol, r.from, onto);
}

CaseIndex apply_solution_subst(const SolutionSubstitution& r, const CaseIndex& sol,
                               const Ontology& onto) {
  if (!applicable(r, sol, onto)) {
    throw Error(ErrorCode::kNotApplicable, "'" + render(r, onto) +
                                               "' does not apply to case '" +
                                               sol.id + "'");
  }
  AtomSet atoms = sol.atoms;
  for (Atom a : r.from.positives()) atoms.erase(a);
  for (Atom a : r.to.positives()) atoms.insert(a);
  for (Atom x : r.to.negatives()) {
    std::vector<Atom> doomed;
    for (Atom c : atoms)
      if (onto.ancestors(c).contains(x)) doomed.push_back(c);
    for (Atom c : doomed) atoms.erase(c);
  }
  return make_case_index(sol.id, sol.title, std::move(atoms), onto);
}

CaseIndex apply_adaptation_path(const AdaptationPath& ap, const CaseIndex& sol,
                                const Ontology& onto) {
  CaseIndex current = sol;
  for (std::size_t i = 0; i < ap.steps.size(); ++i) {
    if (!applicable(ap.steps[i], current, onto)) {
      throw Error(ErrorCode::kNotApplicable,
                  "adaptation step " + std::to_string(i) + " '" +
                      render(ap.steps[i], onto) + "' does not apply");
    }
    current = apply_solution_subst(ap.steps[i], current, onto);
  }
  return current;
}

std::vector<CaseIndex> intermediate_solutions(const AdaptationPath& ap,
                                              const CaseIndex& sol,
                                              const Ontology& onto) {
  std::vector<CaseIndex> out{sol};
  for (std::size_t i = 0; i < ap.steps.size(); ++i) {
    if (!applicable(ap.steps[i], out.back(), onto)) {
      throw Error(ErrorCode::kNotApplicable,
                  "adaptation step " + std::to_string(i) + " '" +
                      render(ap.steps[i], onto) + "' does not apply");
    }
    out.push_back(apply_solution_subst(ap.steps[i], out.back(), onto));
  }
  return out;
}

namespace {

// Adds to B every positive literal of `query` that applying r to `sol`
// would lose.
SolutionSubstitution complete_for(const SolutionSubstitution& r, const CaseIndex& sol,
                                  const Conjunction& query, const Ontology& onto) {
  const CaseIndex after = apply_solution_subst(r, sol, onto);
  SolutionSubstitution out = r;
  for (Atom p : query.positives())
    if (!after.closure.contains(p)) out.to.insert(Literal::pos(p));
  return out;
}

}  // namespace

AdaptationPath build_adaptation_path(const SimilarityPath& sp, const CaseIndex& sol,
                                     std::span<const Reformulation> akb,
                                     const Ontology& onto) {
  // queries[i] is the query before similarity step i.
  std::vector<Conjunction> queries{sp.target};
  for (const auto& s : sp.steps) queries.push_back(apply_query_subst(s, queries.back(), onto));

  AdaptationPath ap;
  CaseIndex current = sol;
  for (std::size_t k = sp.steps.size(); k-- > 0;) {
    const QuerySubstitution& sq = sp.steps[k];
    const Conjunction& wanted = queries[k];

    std::optional<SolutionSubstitution> chosen;
    StepOrigin origin = StepOrigin::kGenerated;
    for (std::size_t idx : akb_matches(sq, akb, onto)) {
      const SolutionSubstitution& r = akb[idx].r;
      if (!applicable(r, current, onto)) continue;
      if (!entails_cw(apply_solution_subst(r, current, onto), wanted, onto)) continue;
      chosen = r;
      origin = StepOrigin::kAkb;
      break;
    }
    if (!chosen) {
      const SolutionSubstitution generated = auto_generate(sq);
      auto candidates = specialize(generated, current, onto);
      const SolutionSubstitution& first = candidates.front();
      origin = first == generated ? StepOrigin::kGenerated : StepOrigin::kSpecialized;
      if (!applicable(first, current, onto)) {
        throw Error(ErrorCode::kNotApplicable,
                    "generated step '" + render(first, onto) +
                        "' does not apply to case '" + current.id + "'");
      }
      chosen = complete_for(first, current, wanted, onto);
    }
    current = apply_solution_subst(*chosen, current, onto);
    ap.steps.push_back(std::move(*chosen));
    ap.origins.push_back(origin);
  }
  return ap;
}

}  // namespace adaptforge
