#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "adaptforge/kernel.hpp"

namespace adaptforge {

/// Closed-world index of one case: the explicit positive atoms plus their
/// cached closure. Any vocabulary atom outside the closure is false.
struct CaseIndex {
  std::string id;
  std::string title;
  AtomSet atoms;
  AtomSet closure;

  friend bool operator==(const CaseIndex&, const CaseIndex&) = default;
};

CaseIndex make_case_index(std::string id, std::string title, AtomSet atoms,
                          const Ontology& onto);

bool entails_cw(const CaseIndex& index, const Conjunction& formula,
                const Ontology& onto);

enum class UnknownAtomPolicy { kStrict, kAutoAdd };

class CaseBase {
 public:
  CaseBase() = default;
  CaseBase(std::shared_ptr<const Ontology> onto, std::vector<CaseIndex> cases);

  const Ontology& ontology() const { return *onto_; }
  std::shared_ptr<const Ontology> ontology_ptr() const { return onto_; }

  /// Ordered by id.
  const std::vector<CaseIndex>& cases() const { return cases_; }
  std::size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }

  const CaseIndex* find(std::string_view id) const;
  /// Throws kNotFound.
  const CaseIndex& at(std::string_view id) const;

 private:
  std::shared_ptr<const Ontology> onto_;
  std::vector<CaseIndex> cases_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

/// Reads one JSON object per line: {"id", "title", "atoms": [...]}. Under
/// kAutoAdd, unknown atoms extend a copy of the ontology that the returned
/// case base then owns.
CaseBase ingest(std::string_view document, std::shared_ptr<const Ontology> onto,
                UnknownAtomPolicy policy = UnknownAtomPolicy::kStrict);

/// Same line format as `ingest`, atoms sorted by name, cases by id.
std::string serialize(const CaseBase& cb);

/// All cases whose index entails `q` under the closed world assumption.
std::vector<const CaseIndex*> matching_cases(const Conjunction& q,
                                             const CaseBase& cb);

}  // namespace adaptforge
