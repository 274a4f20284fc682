#include "adaptforge/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "adaptforge/error.hpp"

namespace adaptforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::kParseError,
                "'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

constexpr std::string_view kKeys[] = {
    "corpus",        "ontology",         "akb",          "host",
    "port",          "log_dir",          "generalize_cost", "drop_negative_cost",
    "cost_bound",    "min_support",      "pair_cap",     "unknown_atom_policy",
    "mining_wait_ms", "workers",
};

}  // namespace

void set_config_value(ServiceConfig& cfg, std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "corpus") cfg.corpus = v;
  else if (key == "ontology") cfg.ontology = v;
  else if (key == "akb") cfg.akb = v;
  else if (key == "host") cfg.host = v;
  else if (key == "port") cfg.port = number<int>(key, value);
  else if (key == "log_dir") cfg.log_dir = v;
  else if (key == "generalize_cost") cfg.retrieval.generalize_cost = number<double>(key, value);
  else if (key == "drop_negative_cost") cfg.retrieval.drop_negative_cost = number<double>(key, value);
  else if (key == "cost_bound") cfg.retrieval.cost_bound = number<double>(key, value);
  else if (key == "min_support") cfg.min_support = number<double>(key, value);
  else if (key == "pair_cap") cfg.pair_cap = number<std::size_t>(key, value);
  else if (key == "mining_wait_ms") cfg.mining_wait_ms = number<int>(key, value);
  else if (key == "workers") cfg.workers = number<unsigned>(key, value);
  else if (key == "unknown_atom_policy") {
    if (value == "strict") cfg.unknown_atom_policy = UnknownAtomPolicy::kStrict;
    else if (value == "auto_add") cfg.unknown_atom_policy = UnknownAtomPolicy::kAutoAdd;
    else
      throw Error(ErrorCode::kParseError,
                  "unknown_atom_policy is 'strict' or 'auto_add', got '" + v + "'");
  } else {
    throw Error(ErrorCode::kParseError, "unknown config key '" + std::string(key) + "'");
  }
}

ServiceConfig parse_config(std::string_view text, ServiceConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

void apply_env(ServiceConfig& cfg, const EnvLookup& env) {
  for (std::string_view key : kKeys) {
    std::string var = "ADAPTFORGE_";
    for (char c : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = env(var.c_str())) {
      try {
        set_config_value(cfg, key, trim(v));
      } catch (const Error& e) {
        throw Error(e.code(), var + ": " + e.what());
      }
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ServiceConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

void validate(const ServiceConfig& cfg) {
  if (!(cfg.min_support > 0.0 && cfg.min_support <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "min_support must lie in (0, 1]");
  if (cfg.port < 0 || cfg.port > 65535)
    throw Error(ErrorCode::kInvalidArgument, "port out of range");
  if (cfg.workers == 0) throw Error(ErrorCode::kInvalidArgument, "workers must be positive");
  if (cfg.pair_cap == 0) throw Error(ErrorCode::kInvalidArgument, "pair_cap must be positive");
  if (cfg.retrieval.generalize_cost <= 0 || cfg.retrieval.drop_negative_cost <= 0)
    throw Error(ErrorCode::kInvalidArgument, "substitution costs must be positive");
  for (const auto& [key, path] : {std::pair{"corpus", cfg.corpus}, {"ontology", cfg.ontology}}) {
    if (path.empty()) throw Error(ErrorCode::kInvalidArgument, std::string(key) + " is not set");
    if (!std::filesystem::exists(path))
      throw Error(ErrorCode::kIoError, std::string(key) + " file " + path + " does not exist");
  }
}

Engine make_engine(const ServiceConfig& cfg) {
  validate(cfg);
  auto onto = std::make_shared<const Ontology>(load_ontology(read_file(cfg.ontology)));
  auto cb = std::make_shared<const CaseBase>(
      ingest(read_file(cfg.corpus), onto, cfg.unknown_atom_policy));
  const Ontology& o = cb->ontology();
  AdaptationKnowledgeBase akb;
  std::optional<std::filesystem::path> persist;
  if (!cfg.akb.empty()) {
    persist = cfg.akb;
    if (std::filesystem::exists(cfg.akb)) akb = load_akb(cfg.akb, o);
  }
  Engine engine;
  engine.cb = cb;
  engine.akb = std::make_shared<AkbStore>(cb->ontology_ptr(), std::move(akb), persist);
  engine.config.retrieval = cfg.retrieval;
  engine.config.min_support = cfg.min_support;
  engine.config.pair_cap = cfg.pair_cap;
  return engine;
}

}  // namespace adaptforge
