#pragma once

// JSON views of engine values, shared by the HTTP service and the CLI so both
// print the same thing for the same input.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adaptforge/session.hpp"

namespace adaptforge::codec {

using Json = nlohmann::ordered_json;

/// Atom names in name order.
std::vector<std::string> names(const AtomSet& atoms, const Ontology& onto);

Json to_json(const CaseIndex& c, const Ontology& onto);
Json to_json(const SimilarityPath& sp, const Ontology& onto);
Json to_json(const AdaptationPath& ap, const Ontology& onto);
Json to_json(const MinedVariation& m, const Ontology& onto);
Json to_json(const std::vector<MinedVariation>& ms, const Ontology& onto);
Json to_json(const Reformulation& r, const Ontology& onto);
Json to_json(const Session& s);

/// Builds a query from wanted atoms (ingredients and types alike) and
/// unwanted ingredients. kUnknownAtom for names outside the vocabulary,
/// kInvalidArgument for an atom both wanted and unwanted.
Conjunction make_query(const std::vector<std::string>& want,
                       const std::vector<std::string>& dont_want, const Ontology& onto);

}  // namespace adaptforge::codec
