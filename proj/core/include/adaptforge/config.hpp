#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "adaptforge/casebase.hpp"
#include "adaptforge/session.hpp"

namespace adaptforge {

struct ServiceConfig {
  std::string corpus;
  std::string ontology;
  /// Created on the first validated reformulation when missing.
  std::string akb;
  std::string host = "127.0.0.1";
  int port = 8080;
  /// Session event logs go here as <session id>.jsonl; empty disables them.
  std::string log_dir;
  RetrievalConfig retrieval;
  double min_support = kDefaultMinSupport;
  std::size_t pair_cap = kDefaultPairCap;
  UnknownAtomPolicy unknown_atom_policy = UnknownAtomPolicy::kStrict;
  /// How long POST /mine blocks before answering 202 with a poll token.
  int mining_wait_ms = 2000;
  /// Concurrent mining runs.
  unsigned workers = 2;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Flat `key = value` lines with `#` comments. Unknown keys and bad values
/// are parse errors naming the line.
ServiceConfig parse_config(std::string_view text, ServiceConfig base = {});
void set_config_value(ServiceConfig& cfg, std::string_view key, std::string_view value);
/// Overrides any key from ADAPTFORGE_<KEY> (e.g. ADAPTFORGE_MIN_SUPPORT).
void apply_env(ServiceConfig& cfg, const EnvLookup& env);
ServiceConfig load_config(const std::filesystem::path& path);

/// Range checks plus existence of the corpus and ontology files.
void validate(const ServiceConfig& cfg);

/// Loads ontology, corpus and AKB named by `cfg`.
Engine make_engine(const ServiceConfig& cfg);

std::string read_file(const std::filesystem::path& path);

}  // namespace adaptforge
