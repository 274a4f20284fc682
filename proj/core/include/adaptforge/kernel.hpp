#pragma once

// Propositional vocabulary, taxonomy ontology and conjunctive formulas.
//
// Atoms are interned names. The ontology is a DAG of single-atom Horn
// implications `a -> b`; entailment of a positive atom is reachability in
// that graph. Case indices are read under the closed world assumption
// ("everything not entailed is false"), queries are not.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace adaptforge {

struct Atom {
  std::uint32_t id = 0;

  friend auto operator<=>(const Atom&, const Atom&) = default;
};

enum class Polarity : std::uint8_t { kPositive, kNegative };

struct Literal {
  Atom atom;
  Polarity polarity = Polarity::kPositive;

  static Literal pos(Atom a) { return {a, Polarity::kPositive}; }
  static Literal neg(Atom a) { return {a, Polarity::kNegative}; }

  bool positive() const { return polarity == Polarity::kPositive; }
  Literal negated() const {
    return {atom, positive() ? Polarity::kNegative : Polarity::kPositive};
  }

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Sorted, duplicate-free set of atoms.
class AtomSet {
 public:
  AtomSet() = default;
  AtomSet(std::initializer_list<Atom> atoms);
  explicit AtomSet(std::vector<Atom> atoms);

  bool contains(Atom a) const;
  bool includes(const AtomSet& other) const;  // other ⊆ *this
  bool insert(Atom a);
  bool erase(Atom a);
  void merge(const AtomSet& other);

  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }
  const std::vector<Atom>& items() const { return atoms_; }

  friend bool operator==(const AtomSet&, const AtomSet&) = default;
  friend auto operator<=>(const AtomSet& a, const AtomSet& b) {
    return a.atoms_ <=> b.atoms_;
  }

 private:
  std::vector<Atom> atoms_;
};

/// Conjunction of literals with set semantics. Never holds an atom with both
/// polarities; the empty conjunction is `true`.
class Conjunction {
 public:
  Conjunction() = default;
  Conjunction(std::initializer_list<Literal> literals);
  explicit Conjunction(std::span<const Literal> literals);

  static Conjunction of_positives(const AtomSet& atoms);

  /// Throws kInvalidArgument when the opposite literal is already present.
  void insert(Literal lit);
  bool erase(Literal lit);
  bool contains(Literal lit) const;

  AtomSet positives() const;
  AtomSet negatives() const;

  bool empty() const { return literals_.empty(); }
  std::size_t size() const { return literals_.size(); }
  auto begin() const { return literals_.begin(); }
  auto end() const { return literals_.end(); }
  std::span<const Literal> literals() const { return literals_; }

  friend bool operator==(const Conjunction&, const Conjunction&) = default;
  friend auto operator<=>(const Conjunction& a, const Conjunction& b) {
    return a.literals_ <=> b.literals_;
  }

 private:
  std::vector<Literal> literals_;  // sorted by (atom, polarity)
};

class Vocabulary {
 public:
  /// Returns the existing atom for `name` or declares a new one.
  Atom intern(std::string_view name);
  std::optional<Atom> find(std::string_view name) const;
  /// Throws kUnknownAtom.
  Atom at(std::string_view name) const;

  const std::string& name(Atom a) const;
  bool contains(Atom a) const { return a.id < names_.size(); }
  std::size_t size() const { return names_.size(); }

  static bool valid_name(std::string_view name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Axiom {
  Atom child;
  Atom parent;

  friend auto operator<=>(const Axiom&, const Axiom&) = default;
};

class Ontology {
 public:
  Ontology() = default;

  /// Validates endpoints and acyclicity (kUnknownAtom, kCycle).
  static Ontology build(Vocabulary vocabulary, std::vector<Axiom> axioms);

  const Vocabulary& vocabulary() const { return vocabulary_; }
  std::span<const Axiom> axioms() const { return axioms_; }
  std::size_t size() const { return vocabulary_.size(); }

  bool has_axiom(Atom child, Atom parent) const;
  /// Direct parents, ordered by name.
  const std::vector<Atom>& parents(Atom a) const;
  /// Reflexive-transitive closure of {a}.
  const AtomSet& ancestors(Atom a) const;

  /// Copy with extra atoms declared (no new axioms).
  Ontology with_atoms(std::span<const std::string> names) const;

  const std::string& name(Atom a) const { return vocabulary_.name(a); }
  Atom atom(std::string_view name) const { return vocabulary_.at(name); }
  void check_known(Atom a) const;

 private:
  void index();

  Vocabulary vocabulary_;
  std::vector<Axiom> axioms_;
  std::vector<std::vector<Atom>> parents_;
  std::vector<AtomSet> ancestors_;
};

/// Parses `child -> parent` lines; `#` starts a comment. A line holding a
/// single atom only declares it.
Ontology load_ontology(std::string_view document);

/// Smallest superset of `atoms` closed under the axioms.
AtomSet closure(const AtomSet& atoms, const Ontology& onto);

/// Closed-world entailment against an index whose closure is given:
/// positives must be in the closure and negatives outside it.
bool entails_cw(const AtomSet& index_closure, const Conjunction& formula,
                const Ontology& onto);

/// Open-world entailment of a literal by a conjunction. A negative literal
/// ¬a is entailed only through an explicit ¬n in `c` with a ⇒* n.
bool entails_open(const Conjunction& c, const Literal& lit,
                  const Ontology& onto);
bool entails_open(const Conjunction& c, const Conjunction& formula,
                  const Ontology& onto);

/// False when the closure of the positive literals hits a negative literal.
bool consistent(const Conjunction& c, const Ontology& onto);

// Rendering: literals `a` / `!a`, conjunctions `&`-joined in name order,
// the empty conjunction as `-`.
std::string render(const Literal& lit, const Ontology& onto);
std::string render(const Conjunction& c, const Ontology& onto);
std::string render(const AtomSet& atoms, const Ontology& onto);
Conjunction parse_conjunction(std::string_view text, const Ontology& onto);

}  // namespace adaptforge
