#include "adaptforge/casebase.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "adaptforge/error.hpp"

namespace adaptforge {

CaseIndex make_case_index(std::string id, std::string title, AtomSet atoms,
                          const Ontology& onto) {
  CaseIndex index{std::move(id), std::move(title), std::move(atoms), {}};
  index.closure = closure(index.atoms, onto);
  return index;
}

bool entails_cw(const CaseIndex& index, const Conjunction& formula,
                const Ontology& onto) {
  return entails_cw(index.closure, formula, onto);
}

CaseBase::CaseBase(std::shared_ptr<const Ontology> onto,
                   std::vector<CaseIndex> cases)
    : onto_(std::move(onto)), cases_(std::move(cases)) {
  std::sort(cases_.begin(), cases_.end(),
            [](const CaseIndex& a, const CaseIndex& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    if (!by_id_.emplace(cases_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate case id '" + cases_[i].id + "'");
    }
  }
}

const CaseIndex* CaseBase::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &cases_[it->second];
}

const CaseIndex& CaseBase::at(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw Error(ErrorCode::kNotFound, "no case with id '" + std::string(id) + "'");
}

namespace {

struct RawRecord {
  std::string id;
  std::string title;
  std::vector<std::string> atoms;
};

}  // namespace

CaseBase ingest(std::string_view document, std::shared_ptr<const Ontology> onto,
                UnknownAtomPolicy policy) {
  std::vector<RawRecord> records;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < document.size()) {
    auto eol = document.find('\n', pos);
    if (eol == std::string_view::npos) eol = document.size();
    std::string_view line = document.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    auto fail = [&](const std::string& what) -> void {
      throw Error(ErrorCode::kParseError,
                  "corpus line " + std::to_string(line_no) + ": " + what);
    };
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("atoms") || !obj["atoms"].is_array()) {
      fail("expected {\"id\": str, \"title\": str, \"atoms\": [str, ...]}");
    }
    RawRecord rec;
    rec.id = obj["id"].get<std::string>();
    if (rec.id.empty()) fail("empty id");
    if (obj.contains("title")) {
      if (!obj["title"].is_string()) fail("title must be a string");
      rec.title = obj["title"].get<std::string>();
    }
    for (const auto& a : obj["atoms"]) {
      if (!a.is_string()) fail("atoms must be strings");
      auto name = a.get<std::string>();
      if (!Vocabulary::valid_name(name)) fail("invalid atom name '" + name + "'");
      rec.atoms.push_back(std::move(name));
    }
    if (!seen.emplace(rec.id, line_no).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "corpus line " + std::to_string(line_no) + ": duplicate id '" +
                      rec.id + "'");
    }
    records.push_back(std::move(rec));
  }

  std::vector<std::string> unknown;
  for (const auto& rec : records) {
    for (const auto& name : rec.atoms) {
      if (onto->vocabulary().find(name)) continue;
      if (policy == UnknownAtomPolicy::kStrict) {
        throw Error(ErrorCode::kUnknownAtom, "case '" + rec.id +
                                                 "' uses unknown atom '" + name + "'");
      }
      unknown.push_back(name);
    }
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
    onto = std::make_shared<const Ontology>(onto->with_atoms(unknown));
  }

  std::vector<CaseIndex> cases;
  cases.reserve(records.size());
  for (auto& rec : records) {
    std::vector<Atom> atoms;
    for (const auto& name : rec.atoms) atoms.push_back(onto->atom(name));
    cases.push_back(make_case_index(std::move(rec.id), std::move(rec.title),
                                    AtomSet(std::move(atoms)), *onto));
  }
  return CaseBase(std::move(onto), std::move(cases));
}

std::string serialize(const CaseBase& cb) {
  std::string out;
  for (const auto& c : cb.cases()) {
    std::vector<std::string> names;
    for (Atom a : c.atoms) names.push_back(cb.ontology().name(a));
    std::sort(names.begin(), names.end());
    nlohmann::ordered_json obj;
    obj["id"] = c.id;
    obj["title"] = c.title;
    obj["atoms"] = names;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<const CaseIndex*> matching_cases(const Conjunction& q,
                                             const CaseBase& cb) {
  for (const auto& lit : q) cb.ontology().check_known(lit.atom);
  std::vector<const CaseIndex*> out;
  for (const auto& c : cb.cases())
    if (entails_cw(c, q, cb.ontology())) out.push_back(&c);
  return out;
}

}  // namespace adaptforge
