#pragma once

// Adaptation knowledge discovery: variations between pairs of cases, a
// seed-restricted training set of such variations, closed frequent
// variation mining, and the reading of a variation as a substitution.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptforge/adaptation.hpp"
#include "adaptforge/casebase.hpp"
#include "adaptforge/kernel.hpp"

namespace adaptforge {

enum class Marker : std::uint8_t { kMinus, kPlus, kEqual };

/// a− (only the first case entails a), a+ (only the second), a= (both).
struct VariationProperty {
  Atom atom;
  Marker marker = Marker::kEqual;

  friend auto operator<=>(const VariationProperty&, const VariationProperty&) = default;
};

/// Set of properties with at most one marker per atom, ordered by atom id.
class Variation {
 public:
  Variation() = default;
  /// Throws kInvalidArgument when an atom appears with two markers.
  explicit Variation(std::vector<VariationProperty> props);

  bool contains(const VariationProperty& p) const;
  /// other ⊆ *this
  bool includes(const Variation& other) const;

  bool empty() const { return props_.empty(); }
  std::size_t size() const { return props_.size(); }
  auto begin() const { return props_.begin(); }
  auto end() const { return props_.end(); }
  std::span<const VariationProperty> properties() const { return props_; }

  friend bool operator==(const Variation&, const Variation&) = default;
  friend auto operator<=>(const Variation& a, const Variation& b) {
    return a.props_ <=> b.props_;
  }

 private:
  std::vector<VariationProperty> props_;
};

/// `oil=`, `peanut_oil-`, `olive_oil+`.
std::string render(const VariationProperty& p, const Ontology& onto);
/// Rendered properties sorted by atom name.
std::vector<std::string> render_properties(const Variation& v, const Ontology& onto);
/// The same list comma-joined; parse_seed reads it back.
std::string render(const Variation& v, const Ontology& onto);

/// Comma-separated `atom-`, `atom+`, `atom=`; U+2212 is accepted for minus.
Variation parse_seed(std::string_view text, const Ontology& onto);

/// Compares the closures of `k` and `l`. Throws kVocabularyMismatch when an
/// index mentions an atom the ontology does not know.
Variation variation(const CaseIndex& k, const CaseIndex& l, const Ontology& onto);

struct TrainingEntry {
  std::string first;
  std::string second;
  Variation variation;
};

struct TrainingSet {
  Variation seed;
  std::vector<TrainingEntry> entries;
  /// Pairs matching the seed before the cap was applied.
  std::size_t matching_pairs = 0;
  bool truncated = false;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

inline constexpr std::size_t kDefaultPairCap = 50000;
inline constexpr double kDefaultMinSupport = 0.2;

/// Ordered pairs (k, l), k != l, whose variation contains `seed`, in
/// (k id, l id) order and cut after `pair_cap` entries.
TrainingSet build_training_set(const CaseBase& cb, const Variation& seed,
                               std::size_t pair_cap = kDefaultPairCap);

/// Fraction of entries containing `v`. Throws kEmptyTrainingSet.
double support(const Variation& v, const TrainingSet& t);

struct MinedVariation {
  Variation variation;
  double support = 0.0;
  std::size_t count = 0;
};

struct MiningConfig {
  /// Threads splitting the first level of the search; 0 or 1 runs inline.
  unsigned workers = 1;
};

/// Every non-empty closed variation with count / |T| >= min_support, sorted
/// by count (descending), size, then rendered properties. Throws
/// kEmptyTrainingSet and kInvalidArgument for a threshold outside (0, 1].
std::vector<MinedVariation> mine_closed(const TrainingSet& t, double min_support,
                                        const Ontology& onto,
                                        const MiningConfig& cfg = {});

/// Minus and equal atoms form A, plus and equal atoms form B; atoms implied
/// by another atom of the same side are dropped. Throws kEmptyAfterPruning.
SolutionSubstitution interpret(const Variation& v, const Ontology& onto);

/// Keeps the entries whose interpretation applies to `sol`.
std::vector<MinedVariation> filter_applicable(std::span<const MinedVariation> rs,
                                              const CaseIndex& sol,
                                              const Ontology& onto);

/// Entries strictly more specific than `base`, order preserved.
std::vector<MinedVariation> refinements(const Variation& base,
                                        std::span<const MinedVariation> rs);

/// Order used by mine_closed; exposed so oracles can sort the same way.
void sort_mined(std::vector<MinedVariation>& rs, const Ontology& onto);

}  // namespace adaptforge
