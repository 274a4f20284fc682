#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptforge/casebase.hpp"
#include "adaptforge/kernel.hpp"
#include "adaptforge/retrieval.hpp"

namespace adaptforge {

/// σR = A => B over conjunctions of literals.
struct SolutionSubstitution {
  Conjunction from;
  Conjunction to;

  friend bool operator==(const SolutionSubstitution&,
                         const SolutionSubstitution&) = default;
};

/// `A => B`, literals `&`-joined in name order, `!` for negation, `-` for
/// an empty side.
std::string render(const SolutionSubstitution& r, const Ontology& onto);
SolutionSubstitution parse_solution_substitution(std::string_view text,
                                                 const Ontology& onto);

struct Provenance {
  std::string session_id;
  std::string timestamp;
  std::string validator;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Reformulation {
  QuerySubstitution q;
  SolutionSubstitution r;
  Provenance provenance;

  friend bool operator==(const Reformulation&, const Reformulation&) = default;
};

/// Where an adaptation step came from.
enum class StepOrigin : std::uint8_t { kAkb, kGenerated, kSpecialized, kUser };

std::string_view to_string(StepOrigin origin);

struct AdaptationPath {
  /// In application order: steps[0] is σR_q (mirrors the last similarity
  /// step), steps.back() is σR_1.
  std::vector<SolutionSubstitution> steps;
  std::vector<StepOrigin> origins;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

/// Index into SimilarityPath::steps of the σQ mirrored by adaptation step
/// `ap_index`.
inline std::size_t mirrored_query_step(std::size_t ap_index, std::size_t length) {
  return length - 1 - ap_index;
}

/// `a => b` gives `b => a`; `!a => -` gives `- => !a`.
SolutionSubstitution auto_generate(const QuerySubstitution& s);

/// For `b => B`, one `c => B` per explicit atom c of `sol` with c ⇒* b, in
/// name order. Returns {r} when r does not have that shape or nothing matches.
std::vector<SolutionSubstitution> specialize(const SolutionSubstitution& r,
                                             const CaseIndex& sol,
                                             const Ontology& onto);

/// Positions of the stored reformulations usable for `s`, in insertion order.
/// An entry matches when its σQ equals `s`, or when A ⊨ β and B ⊨ α.
std::vector<std::size_t> akb_matches(const QuerySubstitution& s,
                                     std::span<const Reformulation> akb,
                                     const Ontology& onto);
std::optional<SolutionSubstitution> akb_lookup(const QuerySubstitution& s,
                                               std::span<const Reformulation> akb,
                                               const Ontology& onto);

/// Closed-world test of the left-hand side against a solution.
bool applicable(const SolutionSubstitution& r, const CaseIndex& sol,
                const Ontology& onto);

/// Removes the positive atoms of A, adds the positive atoms of B, and for
/// each ¬x in B removes every explicit atom entailing x. Throws
/// kNotApplicable when `sol` does not entail A.
CaseIndex apply_solution_subst(const SolutionSubstitution& r, const CaseIndex& sol,
                               const Ontology& onto);

/// Throws kNotApplicable naming the failing step index.
CaseIndex apply_adaptation_path(const AdaptationPath& ap, const CaseIndex& sol,
                                const Ontology& onto);

/// Solutions before and after every step: result[0] is `sol`, result[i + 1]
/// the solution after steps[i].
std::vector<CaseIndex> intermediate_solutions(const AdaptationPath& ap,
                                              const CaseIndex& sol,
                                              const Ontology& onto);

/// Mirrors `sp` from its last step back to its first. Each σR comes from the
/// AKB when an applicable entry keeps the intermediate query satisfied,
/// otherwise it is generated and specialized against the evolving solution.
/// A generated step that would drop a positive literal the intermediate
/// query still needs gets that literal added to its right-hand side.
AdaptationPath build_adaptation_path(const SimilarityPath& sp, const CaseIndex& sol,
                                     std::span<const Reformulation> akb,
                                     const Ontology& onto);

}  // namespace adaptforge
