#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adaptforge/casebase.hpp"
#include "adaptforge/kernel.hpp"

namespace adaptforge {

/// σQ: either a generalization `a => b` generated from an axiom a ⇒ b, or
/// the removal `!a => -` of a negative constraint.
struct QuerySubstitution {
  enum class Kind : std::uint8_t { kGeneralize, kDropNegative };

  Kind kind = Kind::kGeneralize;
  Atom from;
  Atom to;  // unused for kDropNegative

  static QuerySubstitution generalize(Atom a, Atom b) {
    return {Kind::kGeneralize, a, b};
  }
  static QuerySubstitution drop_negative(Atom a) {
    return {Kind::kDropNegative, a, Atom{}};
  }

  /// Left-hand literal α.
  Literal alpha() const {
    return kind == Kind::kGeneralize ? Literal::pos(from) : Literal::neg(from);
  }
  /// Right-hand side β as a conjunction (empty for a removal).
  Conjunction beta() const {
    return kind == Kind::kGeneralize ? Conjunction{Literal::pos(to)} : Conjunction{};
  }

  friend bool operator==(const QuerySubstitution& a, const QuerySubstitution& b) {
    return a.kind == b.kind && a.from == b.from &&
           (a.kind == Kind::kDropNegative || a.to == b.to);
  }
};

std::string render(const QuerySubstitution& s, const Ontology& onto);
/// Accepts `a => b` (must be an axiom) and `!a => -`.
QuerySubstitution parse_query_substitution(std::string_view text,
                                           const Ontology& onto);

struct RetrievalConfig {
  double generalize_cost = 1.0;
  double drop_negative_cost = 2.0;
  double cost_bound = 8.0;
};

struct SimilarityPath {
  Conjunction target;
  std::vector<QuerySubstitution> steps;  // steps[0] is applied first
  Conjunction source;
  std::vector<std::string> retrieved;  // ids of every case matching `source`
  double cost = 0.0;

  /// Query after the first `n` steps; query_after(0) is the target.
  Conjunction query_after(std::size_t n, const Ontology& onto) const;
};

/// Generalizations of positive literals, then removals of negative ones, each
/// group ordered by atom name.
std::vector<QuerySubstitution> applicable_substitutions(const Conjunction& q,
                                                        const Ontology& onto);

/// Throws kNotApplicable when the left-hand literal is not in `q`.
Conjunction apply_query_subst(const QuerySubstitution& s, const Conjunction& q,
                              const Ontology& onto);

/// Uniform-cost search over modified queries for the cheapest path whose
/// final query is matched by at least one case. Equal-cost paths are ordered
/// by their rendered step sequence. Throws kNoPath past `cfg.cost_bound`,
/// kInconsistentQuery when `tgt` contradicts the ontology.
SimilarityPath retrieve(const Conjunction& tgt, const CaseBase& cb,
                        const RetrievalConfig& cfg = {});

}  // namespace adaptforge
