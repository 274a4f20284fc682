#include "adaptforge/kernel.hpp"

#include <algorithm>
#include <sstream>

#include "adaptforge/error.hpp"

namespace adaptforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unknown_atom_message(Atom a) {
  return "unknown atom id " + std::to_string(a.id);
}

}  // namespace

// --- AtomSet ---------------------------------------------------------------

AtomSet::AtomSet(std::initializer_list<Atom> atoms)
    : AtomSet(std::vector<Atom>(atoms)) {}

AtomSet::AtomSet(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool AtomSet::contains(Atom a) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

bool AtomSet::includes(const AtomSet& other) const {
  return std::includes(atoms_.begin(), atoms_.end(), other.atoms_.begin(),
                       other.atoms_.end());
}

bool AtomSet::insert(Atom a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it != atoms_.end() && *it == a) return false;
  atoms_.insert(it, a);
  return true;
}

bool AtomSet::erase(Atom a) {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it == atoms_.end() || *it != a) return false;
  atoms_.erase(it);
  return true;
}

void AtomSet::merge(const AtomSet& other) {
  std::vector<Atom> out;
  out.reserve(atoms_.size() + other.atoms_.size());
  std::set_union(atoms_.begin(), atoms_.end(), other.atoms_.begin(),
                 other.atoms_.end(), std::back_inserter(out));
  atoms_ = std::move(out);
}

// --- Conjunction -----------------------------------------------------------

Conjunction::Conjunction(std::initializer_list<Literal> literals) {
  for (const auto& lit : literals) insert(lit);
}

Conjunction::Conjunction(std::span<const Literal> literals) {
  for (const auto& lit : literals) insert(lit);
}

Conjunction Conjunction::of_positives(const AtomSet& atoms) {
  Conjunction c;
  c.literals_.reserve(atoms.size());
  for (Atom a : atoms) c.literals_.push_back(Literal::pos(a));
  return c;
}

void Conjunction::insert(Literal lit) {
  if (contains(lit.negated())) {
    throw Error(ErrorCode::kInvalidArgument,
                "conjunction would contain an atom with both polarities (atom id " +
                    std::to_string(lit.atom.id) + ")");
  }
  auto it = std::lower_bound(literals_.begin(), literals_.end(), lit);
  if (it != literals_.end() && *it == lit) return;
  literals_.insert(it, lit);
}

bool Conjunction::erase(Literal lit) {
  auto it = std::lower_bound(literals_.begin(), literals_.end(), lit);
  if (it == literals_.end() || *it != lit) return false;
  literals_.erase(it);
  return true;
}

bool Conjunction::contains(Literal lit) const {
  return std::binary_search(literals_.begin(), literals_.end(), lit);
}

AtomSet Conjunction::positives() const {
  std::vector<Atom> out;
  for (const auto& lit : literals_)
    if (lit.positive()) out.push_back(lit.atom);
  return AtomSet(std::move(out));
}

AtomSet Conjunction::negatives() const {
  std::vector<Atom> out;
  for (const auto& lit : literals_)
    if (!lit.positive()) out.push_back(lit.atom);
  return AtomSet(std::move(out));
}

// --- Vocabulary ------------------------------------------------------------

bool Vocabulary::valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
  });
}

Atom Vocabulary::intern(std::string_view name) {
  if (auto found = find(name)) return *found;
  if (!valid_name(name)) {
    throw Error(ErrorCode::kParseError,
                "invalid atom name '" + std::string(name) + "'");
  }
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return Atom{id};
}

std::optional<Atom> Vocabulary::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return Atom{it->second};
}

Atom Vocabulary::at(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw Error(ErrorCode::kUnknownAtom,
              "unknown atom '" + std::string(name) + "'");
}

const std::string& Vocabulary::name(Atom a) const {
  if (!contains(a)) throw Error(ErrorCode::kUnknownAtom, unknown_atom_message(a));
  return names_[a.id];
}

// --- Ontology --------------------------------------------------------------

Ontology Ontology::build(Vocabulary vocabulary, std::vector<Axiom> axioms) {
  Ontology onto;
  onto.vocabulary_ = std::move(vocabulary);
  for (const auto& ax : axioms) {
    onto.check_known(ax.child);
    onto.check_known(ax.parent);
  }
  std::sort(axioms.begin(), axioms.end());
  axioms.erase(std::unique(axioms.begin(), axioms.end()), axioms.end());
  onto.axioms_ = std::move(axioms);
  onto.index();
  return onto;
}

void Ontology::index() {
  const std::size_t n = vocabulary_.size();
  parents_.assign(n, {});
  for (const auto& ax : axioms_) parents_[ax.child.id].push_back(ax.parent);
  for (auto& ps : parents_) {
    std::sort(ps.begin(), ps.end(), [this](Atom a, Atom b) {
      return vocabulary_.name(a) < vocabulary_.name(b);
    });
  }

  // Iterative DFS: colour 1 = on stack, 2 = done. Ancestors are filled in
  // post-order so every parent is complete before its children.
  ancestors_.assign(n, AtomSet{});
  std::vector<std::uint8_t> colour(n, 0);
  std::vector<std::uint32_t> trail;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (colour[root] != 0) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    trail.assign(1, root);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents_[node].size()) {
        const std::uint32_t p = parents_[node][next++].id;
        if (colour[p] == 1) {
          auto from = std::find(trail.begin(), trail.end(), p);
          std::string cycle;
          for (auto it = from; it != trail.end(); ++it)
            cycle += vocabulary_.name(Atom{*it}) + " -> ";
          cycle += vocabulary_.name(Atom{p});
          throw Error(ErrorCode::kCycle, "cycle in ontology: " + cycle);
        }
        if (colour[p] == 0) {
          colour[p] = 1;
          stack.emplace_back(p, 0);
          trail.push_back(p);
        }
        continue;
      }
      AtomSet anc{Atom{node}};
      for (Atom p : parents_[node]) anc.merge(ancestors_[p.id]);
      ancestors_[node] = std::move(anc);
      colour[node] = 2;
      stack.pop_back();
      trail.pop_back();
    }
  }
}

bool Ontology::has_axiom(Atom child, Atom parent) const {
  return std::binary_search(axioms_.begin(), axioms_.end(), Axiom{child, parent});
}

const std::vector<Atom>& Ontology::parents(Atom a) const {
  check_known(a);
  return parents_[a.id];
}

const AtomSet& Ontology::ancestors(Atom a) const {
  check_known(a);
  return ancestors_[a.id];
}

void Ontology::check_known(Atom a) const {
  if (!vocabulary_.contains(a))
    throw Error(ErrorCode::kUnknownAtom, unknown_atom_message(a));
}

Ontology Ontology::with_atoms(std::span<const std::string> names) const {
  Vocabulary vocab = vocabulary_;
  for (const auto& n : names) vocab.intern(n);
  return build(std::move(vocab), axioms_);
}

Ontology load_ontology(std::string_view document) {
  Vocabulary vocab;
  std::vector<Axiom> axioms;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    auto eol = document.find('\n', pos);
    if (eol == std::string_view::npos) eol = document.size();
    std::string_view line = document.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kParseError,
                  "ontology line " + std::to_string(line_no) + ": " + what);
    };
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      if (!Vocabulary::valid_name(line)) fail("expected 'child -> parent'");
      vocab.intern(line);
      continue;
    }
    const auto child = trim(line.substr(0, arrow));
    const auto parent = trim(line.substr(arrow + 2));
    if (!Vocabulary::valid_name(child))
      fail("invalid atom name '" + std::string(child) + "'");
    if (!Vocabulary::valid_name(parent))
      fail("invalid atom name '" + std::string(parent) + "'");
    axioms.push_back({vocab.intern(child), vocab.intern(parent)});
  }
  return Ontology::build(std::move(vocab), std::move(axioms));
}

// --- Entailment ------------------------------------------------------------

AtomSet closure(const AtomSet& atoms, const Ontology& onto) {
  AtomSet out;
  for (Atom a : atoms) out.merge(onto.ancestors(a));
  return out;
}

bool entails_cw(const AtomSet& index_closure, const Conjunction& formula,
                const Ontology& onto) {
  for (const auto& lit : formula) {
    onto.check_known(lit.atom);
    if (index_closure.contains(lit.atom) != lit.positive()) return false;
  }
  return true;
}

bool consistent(const Conjunction& c, const Ontology& onto) {
  const AtomSet negs = c.negatives();
  if (negs.empty()) return true;
  for (Atom a : c.positives())
    for (Atom up : onto.ancestors(a))
      if (negs.contains(up)) return false;
  return true;
}

bool entails_open(const Conjunction& c, const Literal& lit,
                  const Ontology& onto) {
  onto.check_known(lit.atom);
  for (const auto& l : c) onto.check_known(l.atom);
  if (!consistent(c, onto)) return true;
  if (lit.positive()) {
    for (Atom a : c.positives())
      if (onto.ancestors(a).contains(lit.atom)) return true;
    return false;
  }
  // c ⊨ ¬a iff some ¬n ∈ c with a ⇒* n (contrapositive of the taxonomy).
  const AtomSet& up = onto.ancestors(lit.atom);
  for (Atom n : c.negatives())
    if (up.contains(n)) return true;
  return false;
}

bool entails_open(const Conjunction& c, const Conjunction& formula,
                  const Ontology& onto) {
  return std::all_of(formula.begin(), formula.end(), [&](const Literal& lit) {
    return entails_open(c, lit, onto);
  });
}

// --- Rendering -------------------------------------------------------------

std::string render(const Literal& lit, const Ontology& onto) {
  return (lit.positive() ? "" : "!") + onto.name(lit.atom);
}

std::string render(const Conjunction& c, const Ontology& onto) {
  if (c.empty()) return "-";
  std::vector<std::pair<std::string, std::string>> parts;
  for (const auto& lit : c) parts.emplace_back(onto.name(lit.atom), render(lit, onto));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& [_, text] : parts) {
    if (!out.empty()) out += '&';
    out += text;
  }
  return out;
}

std::string render(const AtomSet& atoms, const Ontology& onto) {
  std::vector<std::string> names;
  for (Atom a : atoms) names.push_back(onto.name(a));
  std::sort(names.begin(), names.end());
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out + "}";
}

Conjunction parse_conjunction(std::string_view text, const Ontology& onto) {
  text = trim(text);
  Conjunction out;
  if (text == "-" || text == "\xE2\x88\x85" /* ∅ */ || text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto amp = text.find('&', pos);
    if (amp == std::string_view::npos) amp = text.size();
    auto token = trim(text.substr(pos, amp - pos));
    pos = amp + 1;
    bool negative = false;
    if (!token.empty() && token.front() == '!') {
      negative = true;
      token = trim(token.substr(1));
    }
    if (!Vocabulary::valid_name(token)) {
      throw Error(ErrorCode::kParseError,
                  "invalid literal '" + std::string(token) + "' in '" +
                      std::string(text) + "'");
    }
    const Atom a = onto.atom(token);
    out.insert(negative ? Literal::neg(a) : Literal::pos(a));
  }
  return out;
}

}  // namespace adaptforge
