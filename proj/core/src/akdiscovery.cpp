#include "adaptforge/akdiscovery.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <iterator>
#include <map>
#include <thread>

#include "adaptforge/error.hpp"

namespace adaptforge {

Variation::Variation(std::vector<VariationProperty> props) : props_(std::move(props)) {
  std::sort(props_.begin(), props_.end());
  props_.erase(std::unique(props_.begin(), props_.end()), props_.end());
  for (std::size_t i = 1; i < props_.size(); ++i) {
    if (props_[i].atom == props_[i - 1].atom) {
      throw Error(ErrorCode::kInvalidArgument,
                  "atom id " + std::to_string(props_[i].atom.id) +
                      " carries two markers in one variation");
    }
  }
}

bool Variation::contains(const VariationProperty& p) const {
  return std::binary_search(props_.begin(), props_.end(), p);
}

bool Variation::includes(const Variation& other) const {
  return std::includes(props_.begin(), props_.end(), other.props_.begin(),
                       other.props_.end());
}

std::string render(const VariationProperty& p, const Ontology& onto) {
  static constexpr char kSuffix[] = {'-', '+', '='};
  return onto.name(p.atom) + kSuffix[static_cast<int>(p.marker)];
}

std::vector<std::string> render_properties(const Variation& v, const Ontology& onto) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(render(p, onto));
  std::sort(out.begin(), out.end());
  return out;
}

std::string render(const Variation& v, const Ontology& onto) {
  std::string out;
  for (const auto& s : render_properties(v, onto)) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";

}  // namespace

Variation parse_seed(std::string_view text, const Ontology& onto) {
  std::vector<VariationProperty> props;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto token = trim(text.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos));
    pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
    if (token.empty()) {
      if (comma == std::string_view::npos && props.empty()) break;
      throw Error(ErrorCode::kParseError, "empty property in seed '" + std::string(text) + "'");
    }
    Marker marker;
    std::string_view name;
    if (token.size() > kUnicodeMinus.size() && token.ends_with(kUnicodeMinus)) {
      marker = Marker::kMinus;
      name = token.substr(0, token.size() - kUnicodeMinus.size());
    } else {
      switch (token.back()) {
        case '-': marker = Marker::kMinus; break;
        case '+': marker = Marker::kPlus; break;
        case '=': marker = Marker::kEqual; break;
        default:
          throw Error(ErrorCode::kParseError, "seed property '" + std::string(token) +
                                                  "' must end in -, + or =");
      }
      name = token.substr(0, token.size() - 1);
    }
    name = trim(name);
    if (!Vocabulary::valid_name(name))
      throw Error(ErrorCode::kParseError, "bad atom name in seed: '" + std::string(name) + "'");
    props.push_back({onto.atom(name), marker});
  }
  try {
    return Variation(std::move(props));
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed '" + std::string(text) + "' gives one atom two markers");
  }
}

Variation variation(const CaseIndex& k, const CaseIndex& l, const Ontology& onto) {
  for (const CaseIndex* c : {&k, &l}) {
    if (!c->closure.empty() && !onto.vocabulary().contains(c->closure.items().back())) {
      throw Error(ErrorCode::kVocabularyMismatch,
                  "case '" + c->id + "' was indexed over a different vocabulary");
    }
  }
  std::vector<VariationProperty> props;
  auto a = k.closure.begin();
  auto b = l.closure.begin();
  while (a != k.closure.end() || b != l.closure.end()) {
    if (b == l.closure.end() || (a != k.closure.end() && *a < *b)) {
      props.push_back({*a++, Marker::kMinus});
    } else if (a == k.closure.end() || *b < *a) {
      props.push_back({*b++, Marker::kPlus});
    } else {
      props.push_back({*a, Marker::kEqual});
      ++a;
      ++b;
    }
  }
  return Variation(std::move(props));
}

TrainingSet build_training_set(const CaseBase& cb, const Variation& seed,
                               std::size_t pair_cap) {
  // A pair matches the seed iff its first case sits on the "before" side of
  // every property and its second case on the "after" side, so the pairs are
  // exactly (K x L) minus the diagonal.
  auto first_side = [&](const CaseIndex& c) {
    for (const auto& p : seed) {
      const bool has = c.closure.contains(p.atom);
      if (p.marker == Marker::kPlus ? has : !has) return false;
    }
    return true;
  };
  auto second_side = [&](const CaseIndex& c) {
    for (const auto& p : seed) {
      const bool has = c.closure.contains(p.atom);
      if (p.marker == Marker::kMinus ? has : !has) return false;
    }
    return true;
  };
  std::vector<const CaseIndex*> ks, ls;
  for (const auto& c : cb.cases()) {
    if (first_side(c)) ks.push_back(&c);
    if (second_side(c)) ls.push_back(&c);
  }

  TrainingSet t;
  t.seed = seed;
  for (const CaseIndex* k : ks) {
    for (const CaseIndex* l : ls) {
      if (k == l) continue;
      ++t.matching_pairs;
      if (t.entries.size() < pair_cap)
        t.entries.push_back({k->id, l->id, variation(*k, *l, cb.ontology())});
    }
  }
  t.truncated = t.matching_pairs > t.entries.size();
  return t;
}

double support(const Variation& v, const TrainingSet& t) {
  if (t.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "support over an empty training set");
  const auto n = std::count_if(t.entries.begin(), t.entries.end(),
                               [&](const TrainingEntry& e) { return e.variation.includes(v); });
  return static_cast<double>(n) / static_cast<double>(t.size());
}

void sort_mined(std::vector<MinedVariation>& rs, const Ontology& onto) {
  std::vector<std::pair<std::vector<std::string>, MinedVariation>> keyed;
  keyed.reserve(rs.size());
  for (auto& r : rs) keyed.emplace_back(render_properties(r.variation, onto), std::move(r));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    if (a.second.variation.size() != b.second.variation.size())
      return a.second.variation.size() < b.second.variation.size();
    return a.first < b.first;
  });
  rs.clear();
  for (auto& [_, r] : keyed) rs.push_back(std::move(r));
}

namespace {

using Word = std::uint64_t;

// Vertical layout for closed-set enumeration: one transaction bitset per
// item, items numbered densely in property order.
class Miner {
 public:
  Miner(const TrainingSet& t, double min_support) : n_(t.size()), min_support_(min_support) {
    std::map<VariationProperty, std::size_t> dense;
    for (const auto& e : t.entries)
      for (const auto& p : e.variation) dense.emplace(p, 0);
    std::size_t next = 0;
    for (auto& [p, idx] : dense) {
      idx = next++;
      items_.push_back(p);
    }
    words_ = (n_ + 63) / 64;
    tids_.assign(items_.size(), std::vector<Word>(words_, 0));
    rows_.resize(n_);
    std::size_t cells = 0;
    for (std::size_t row = 0; row < n_; ++row) {
      for (const auto& p : t.entries[row].variation) {
        const std::size_t i = dense[p];
        tids_[i][row / 64] |= Word{1} << (row % 64);
        rows_[row].push_back(i);
      }
      cells += rows_[row].size();
    }
    avg_row_ = n_ ? static_cast<double>(cells) / static_cast<double>(n_) : 0.0;
  }

  std::vector<MinedVariation> run(unsigned workers) {
    std::vector<Word> all(words_, ~Word{0});
    if (n_ % 64 != 0) all.back() = (Word{1} << (n_ % 64)) - 1;
    const auto root = closure_of(all, n_);

    std::vector<MinedVariation> out;
    if (!root.empty()) out.push_back(make(root, n_));

    const auto cands = candidates(all, root, 0);
    if (workers <= 1 || cands.size() < 2) {
      for (const auto& [f, count] : cands) child(all, root, f, count, out);
      return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::vector<MinedVariation>> partial(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k; (k = next.fetch_add(1)) < cands.size();)
          child(all, root, cands[k].first, cands[k].second, partial[w]);
      });
    }
    for (auto& th : pool) th.join();
    for (auto& part : partial)
      for (auto& r : part) out.push_back(std::move(r));
    return out;
  }

 private:
  bool frequent(std::size_t count) const {
    return count > 0 &&
           static_cast<double>(count) / static_cast<double>(n_) >= min_support_;
  }

  // Frequent items >= `from` outside `prefix`, with their counts inside
  // `tids`, gathered from the rows of the transactions in `tids`.
  std::vector<std::pair<std::size_t, std::size_t>> candidates(
      const std::vector<Word>& tids, const std::vector<std::size_t>& prefix,
      std::size_t from) const {
    std::vector<std::size_t> counts(items_.size(), 0);
    for (std::size_t w = 0; w < words_; ++w) {
      for (Word bits = tids[w]; bits != 0; bits &= bits - 1) {
        const auto& row = rows_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
        for (auto it = std::lower_bound(row.begin(), row.end(), from); it != row.end(); ++it)
          ++counts[*it];
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t f = from; f < items_.size(); ++f) {
      if (frequent(counts[f]) && !std::binary_search(prefix.begin(), prefix.end(), f))
        out.emplace_back(f, counts[f]);
    }
    return out;
  }

  // Items shared by every transaction in `tids`. Small tidsets intersect
  // their rows; large ones test each item column.
  std::vector<std::size_t> closure_of(const std::vector<Word>& tids, std::size_t count) const {
    std::vector<std::size_t> out;
    if (static_cast<double>(count) * avg_row_ < static_cast<double>(items_.size() * words_)) {
      bool first = true;
      for (std::size_t w = 0; w < words_; ++w) {
        for (Word bits = tids[w]; bits != 0; bits &= bits - 1) {
          const auto& row = rows_[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
          if (first) {
            out = row;
            first = false;
          } else {
            std::vector<std::size_t> kept;
            std::set_intersection(out.begin(), out.end(), row.begin(), row.end(),
                                  std::back_inserter(kept));
            out.swap(kept);
          }
          if (out.empty()) return out;
        }
      }
      return out;
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      const auto& ti = tids_[i];
      bool all = true;
      for (std::size_t w = 0; w < words_ && all; ++w) all = (tids[w] & ~ti[w]) == 0;
      if (all) out.push_back(i);
    }
    return out;
  }

  MinedVariation make(const std::vector<std::size_t>& items, std::size_t count) const {
    std::vector<VariationProperty> props;
    props.reserve(items.size());
    for (auto i : items) props.push_back(items_[i]);
    return {Variation(std::move(props)),
            static_cast<double>(count) / static_cast<double>(n_), count};
  }

  // Tries P ∪ {e}; emits and recurses when its closure keeps P's prefix
  // below e, which makes every closed set reachable from exactly one parent.
  void child(const std::vector<Word>& tids, const std::vector<std::size_t>& prefix,
             std::size_t e, std::size_t count, std::vector<MinedVariation>& out) const {
    std::vector<Word> next(words_);
    for (std::size_t w = 0; w < words_; ++w) next[w] = tids[w] & tids_[e][w];
    auto closed = closure_of(next, count);
    for (auto q : closed) {
      if (q >= e) break;
      if (!std::binary_search(prefix.begin(), prefix.end(), q)) return;
    }
    out.push_back(make(closed, count));
    for (const auto& [f, c] : candidates(next, closed, e + 1)) child(next, closed, f, c, out);
  }

  std::size_t n_;
  double min_support_;
  std::size_t words_ = 0;
  std::vector<VariationProperty> items_;
  std::vector<std::vector<Word>> tids_;
  std::vector<std::vector<std::size_t>> rows_;  // dense items per transaction, ascending
  double avg_row_ = 0.0;
};

}  // namespace

std::vector<MinedVariation> mine_closed(const TrainingSet& t, double min_support,
                                        const Ontology& onto, const MiningConfig& cfg) {
  if (t.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "cannot mine an empty training set");
  if (!(min_support > 0.0 && min_support <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "support threshold must lie in (0, 1], got " + std::to_string(min_support));
  }
  auto out = Miner(t, min_support).run(cfg.workers);
  sort_mined(out, onto);
  return out;
}

SolutionSubstitution interpret(const Variation& v, const Ontology& onto) {
  AtomSet from, to;
  for (const auto& p : v) {
    if (p.marker != Marker::kPlus) from.insert(p.atom);
    if (p.marker != Marker::kMinus) to.insert(p.atom);
  }
  auto prune = [&](const AtomSet& side) {
    Conjunction out;
    for (Atom x : side) {
      const bool implied = std::any_of(side.begin(), side.end(), [&](Atom y) {
        return y != x && onto.ancestors(y).contains(x);
      });
      if (!implied) out.insert(Literal::pos(x));
    }
    return out;
  };
  SolutionSubstitution r{prune(from), prune(to)};
  if (r.from.empty() && r.to.empty())
    throw Error(ErrorCode::kEmptyAfterPruning, "variation interprets to an empty substitution");
  return r;
}

std::vector<MinedVariation> filter_applicable(std::span<const MinedVariation> rs,
                                              const CaseIndex& sol,
                                              const Ontology& onto) {
  std::vector<MinedVariation> out;
  for (const auto& r : rs) {
    if (r.variation.empty()) continue;
    if (applicable(interpret(r.variation, onto), sol, onto)) out.push_back(r);
  }
  return out;
}

std::vector<MinedVariation> refinements(const Variation& base,
                                        std::span<const MinedVariation> rs) {
  std::vector<MinedVariation> out;
  for (const auto& r : rs)
    if (r.variation.size() > base.size() && r.variation.includes(base)) out.push_back(r);
  return out;
}

}  // namespace adaptforge
