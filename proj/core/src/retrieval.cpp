#include "adaptforge/retrieval.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "adaptforge/error.hpp"

namespace adaptforge {

std::string render(const QuerySubstitution& s, const Ontology& onto) {
  if (s.kind == QuerySubstitution::Kind::kDropNegative)
    return "!" + onto.name(s.from) + " => -";
  return onto.name(s.from) + " => " + onto.name(s.to);
}

QuerySubstitution parse_query_substitution(std::string_view text,
                                           const Ontology& onto) {
  const auto arrow = text.find("=>");
  if (arrow == std::string_view::npos) {
    throw Error(ErrorCode::kParseError,
                "expected 'a => b' or '!a => -', got '" + std::string(text) + "'");
  }
  const Conjunction lhs = parse_conjunction(text.substr(0, arrow), onto);
  const Conjunction rhs = parse_conjunction(text.substr(arrow + 2), onto);
  if (lhs.size() != 1) {
    throw Error(ErrorCode::kParseError,
                "query substitution needs a single left literal: '" +
                    std::string(text) + "'");
  }
  const Literal alpha = *lhs.begin();
  if (!alpha.positive() && rhs.empty())
    return QuerySubstitution::drop_negative(alpha.atom);
  if (alpha.positive() && rhs.size() == 1 && rhs.begin()->positive()) {
    const Atom b = rhs.begin()->atom;
    if (!onto.has_axiom(alpha.atom, b)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no axiom " + onto.name(alpha.atom) + " -> " + onto.name(b));
    }
    return QuerySubstitution::generalize(alpha.atom, b);
  }
  throw Error(ErrorCode::kParseError,
              "unsupported query substitution '" + std::string(text) + "'");
}

Conjunction SimilarityPath::query_after(std::size_t n, const Ontology& onto) const {
  Conjunction q = target;
  for (std::size_t i = 0; i < n && i < steps.size(); ++i)
    q = apply_query_subst(steps[i], q, onto);
  return q;
}

std::vector<QuerySubstitution> applicable_substitutions(const Conjunction& q,
                                                        const Ontology& onto) {
  std::vector<std::pair<std::string, QuerySubstitution>> gens;
  std::vector<std::pair<std::string, QuerySubstitution>> drops;
  for (const auto& lit : q) {
    if (lit.positive()) {
      for (Atom parent : onto.parents(lit.atom)) {
        gens.emplace_back(onto.name(lit.atom) + '\0' + onto.name(parent),
                          QuerySubstitution::generalize(lit.atom, parent));
      }
    } else {
      drops.emplace_back(onto.name(lit.atom),
                         QuerySubstitution::drop_negative(lit.atom));
    }
  }
  auto by_key = [](const auto& a, const auto& b) { return a.first < b.first; };
  std::sort(gens.begin(), gens.end(), by_key);
  std::sort(drops.begin(), drops.end(), by_key);
  std::vector<QuerySubstitution> out;
  out.reserve(gens.size() + drops.size());
  for (auto& [_, s] : gens) out.push_back(s);
  for (auto& [_, s] : drops) out.push_back(s);
  return out;
}

Conjunction apply_query_subst(const QuerySubstitution& s, const Conjunction& q,
                              const Ontology& onto) {
  if (!q.contains(s.alpha())) {
    throw Error(ErrorCode::kNotApplicable,
                "'" + render(s, onto) + "' does not apply to '" + render(q, onto) + "'");
  }
  Conjunction out = q;
  out.erase(s.alpha());
  if (s.kind == QuerySubstitution::Kind::kGeneralize) out.insert(Literal::pos(s.to));
  return out;
}

namespace {

struct Node {
  double cost;
  std::vector<std::string> rendered;
  std::vector<QuerySubstitution> steps;
  Conjunction query;
};

struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.rendered > b.rendered;
  }
};

}  // namespace

SimilarityPath retrieve(const Conjunction& tgt, const CaseBase& cb,
                        const RetrievalConfig& cfg) {
  const Ontology& onto = cb.ontology();
  for (const auto& lit : tgt) onto.check_known(lit.atom);
  if (cb.empty()) throw Error(ErrorCode::kEmptyCaseBase, "case base is empty");
  if (!consistent(tgt, onto)) {
    throw Error(ErrorCode::kInconsistentQuery,
                "query '" + render(tgt, onto) + "' contradicts the ontology");
  }
  if (cfg.generalize_cost <= 0.0 || cfg.drop_negative_cost <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "substitution costs must be positive");
  }

  std::priority_queue<Node, std::vector<Node>, NodeAfter> frontier;
  std::set<Conjunction> settled;
  frontier.push(Node{0.0, {}, {}, tgt});
  while (!frontier.empty()) {
    Node node = frontier.top();
    frontier.pop();
    if (!settled.insert(node.query).second) continue;

    auto matches = matching_cases(node.query, cb);
    if (!matches.empty()) {
      SimilarityPath path;
      path.target = tgt;
      path.steps = std::move(node.steps);
      path.source = std::move(node.query);
      path.cost = node.cost;
      for (const auto* c : matches) path.retrieved.push_back(c->id);
      return path;
    }

    for (const auto& s : applicable_substitutions(node.query, onto)) {
      const double step_cost = s.kind == QuerySubstitution::Kind::kGeneralize
                                   ? cfg.generalize_cost
                                   : cfg.drop_negative_cost;
      const double cost = node.cost + step_cost;
      if (cost > cfg.cost_bound) continue;
      Conjunction next = apply_query_subst(s, node.query, onto);
      if (settled.contains(next)) continue;
      Node child{cost, node.rendered, node.steps, std::move(next)};
      child.rendered.push_back(render(s, onto));
      child.steps.push_back(s);
      frontier.push(std::move(child));
    }
  }
  throw Error(ErrorCode::kNoPath, "no case matches '" + render(tgt, onto) +
                                      "' within cost bound " +
                                      std::to_string(cfg.cost_bound));
}

}  // namespace adaptforge
