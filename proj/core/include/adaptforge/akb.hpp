#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptforge/adaptation.hpp"

namespace adaptforge {

inline constexpr int kAkbSchemaVersion = 1;

/// Append-only list of validated reformulations. Two entries never share the
/// same (q, r); `version` counts successful additions.
class AdaptationKnowledgeBase {
 public:
  AdaptationKnowledgeBase() = default;
  AdaptationKnowledgeBase(std::vector<Reformulation> entries, std::uint64_t version);

  /// Returns false (and leaves the version alone) for a duplicate (q, r).
  bool add(Reformulation ref);
  bool contains(const QuerySubstitution& q, const SolutionSubstitution& r) const;

  std::span<const Reformulation> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t version() const { return version_; }

  /// The first `n` entries, as a knowledge base of version `n`.
  AdaptationKnowledgeBase prefix(std::size_t n) const;

  friend bool operator==(const AdaptationKnowledgeBase&,
                         const AdaptationKnowledgeBase&) = default;

 private:
  std::vector<Reformulation> entries_;
  std::uint64_t version_ = 0;
};

/// {"schema": 1, "version": n, "entries": [{"q", "r", "provenance"}]}
std::string to_json_text(const AdaptationKnowledgeBase& akb, const Ontology& onto);
/// Empty or whitespace-only text yields an empty knowledge base.
AdaptationKnowledgeBase from_json_text(std::string_view text, const Ontology& onto);

void save(const AdaptationKnowledgeBase& akb, const std::filesystem::path& path,
          const Ontology& onto);
/// A missing file is an I/O error; an empty file is an empty knowledge base.
AdaptationKnowledgeBase load_akb(const std::filesystem::path& path,
                                 const Ontology& onto);

/// Single-writer owner of the live knowledge base. Readers get immutable
/// snapshots; writers are serialized and, when a path is set, persisted.
class AkbStore {
 public:
  AkbStore(std::shared_ptr<const Ontology> onto, AdaptationKnowledgeBase initial,
           std::optional<std::filesystem::path> persist_to = std::nullopt);

  std::shared_ptr<const AdaptationKnowledgeBase> snapshot() const;
  bool add(Reformulation ref);
  const Ontology& ontology() const { return *onto_; }

 private:
  std::shared_ptr<const Ontology> onto_;
  std::optional<std::filesystem::path> persist_to_;
  mutable std::mutex mu_;
  std::shared_ptr<const AdaptationKnowledgeBase> current_;
};

}  // namespace adaptforge
