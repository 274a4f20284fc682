#include "adaptforge/akb.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adaptforge/error.hpp"

namespace adaptforge {

AdaptationKnowledgeBase::AdaptationKnowledgeBase(std::vector<Reformulation> entries,
                                                 std::uint64_t version)
    : entries_(std::move(entries)), version_(version) {}

bool AdaptationKnowledgeBase::contains(const QuerySubstitution& q,
                                       const SolutionSubstitution& r) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Reformulation& e) {
    return e.q == q && e.r == r;
  });
}

bool AdaptationKnowledgeBase::add(Reformulation ref) {
  if (contains(ref.q, ref.r)) return false;
  entries_.push_back(std::move(ref));
  ++version_;
  return true;
}

AdaptationKnowledgeBase AdaptationKnowledgeBase::prefix(std::size_t n) const {
  n = std::min(n, entries_.size());
  return AdaptationKnowledgeBase(
      std::vector<Reformulation>(entries_.begin(), entries_.begin() + n), n);
}

std::string to_json_text(const AdaptationKnowledgeBase& akb, const Ontology& onto) {
  nlohmann::ordered_json doc;
  doc["schema"] = kAkbSchemaVersion;
  doc["version"] = akb.version();
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : akb.entries()) {
    nlohmann::ordered_json entry;
    entry["q"] = render(e.q, onto);
    entry["r"] = render(e.r, onto);
    entry["provenance"] = {{"sessionId", e.provenance.session_id},
                           {"timestamp", e.provenance.timestamp},
                           {"validator", e.provenance.validator}};
    doc["entries"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

AdaptationKnowledgeBase from_json_text(std::string_view text, const Ontology& onto) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("AKB: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_number_integer())
    throw Error(ErrorCode::kParseError, "AKB: missing integer 'schema'");
  if (doc["schema"].get<int>() != kAkbSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch,
                "AKB schema " + doc["schema"].dump() + " is not supported; expected " +
                    std::to_string(kAkbSchemaVersion));
  }
  try {
    std::vector<Reformulation> entries;
    for (const auto& e : doc.at("entries")) {
      Reformulation ref;
      ref.q = parse_query_substitution(e.at("q").get<std::string>(), onto);
      ref.r = parse_solution_substitution(e.at("r").get<std::string>(), onto);
      if (e.contains("provenance")) {
        const auto& p = e["provenance"];
        ref.provenance.session_id = p.value("sessionId", "");
        ref.provenance.timestamp = p.value("timestamp", "");
        ref.provenance.validator = p.value("validator", "");
      }
      entries.push_back(std::move(ref));
    }
    const auto version = doc.value("version", static_cast<std::uint64_t>(entries.size()));
    return AdaptationKnowledgeBase(std::move(entries), version);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("AKB: ") + e.what());
  }
}

void save(const AdaptationKnowledgeBase& akb, const std::filesystem::path& path,
          const Ontology& onto) {
  const std::string text = to_json_text(akb, onto);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot replace " + path.string() + ": " + ec.message());
}

AdaptationKnowledgeBase load_akb(const std::filesystem::path& path,
                                 const Ontology& onto) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), onto);
}

AkbStore::AkbStore(std::shared_ptr<const Ontology> onto, AdaptationKnowledgeBase initial,
                   std::optional<std::filesystem::path> persist_to)
    : onto_(std::move(onto)),
      persist_to_(std::move(persist_to)),
      current_(std::make_shared<const AdaptationKnowledgeBase>(std::move(initial))) {}

std::shared_ptr<const AdaptationKnowledgeBase> AkbStore::snapshot() const {
  std::lock_guard lock(mu_);
  return current_;
}

bool AkbStore::add(Reformulation ref) {
  std::lock_guard lock(mu_);
  auto next = std::make_shared<AdaptationKnowledgeBase>(*current_);
  if (!next->add(std::move(ref))) return false;
  if (persist_to_) save(*next, *persist_to_, *onto_);
  current_ = std::move(next);
  return true;
}

}  // namespace adaptforge
