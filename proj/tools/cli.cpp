#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "adaptforge/codec.hpp"
#include "adaptforge/config.hpp"
#include "adaptforge/error.hpp"
#include "adaptforge/service.hpp"

namespace adaptforge::cli {

namespace {

struct Common {
  std::string config;
  std::string corpus;
  std::string ontology;
  std::string akb;
  std::optional<double> generalize_cost;
  std::optional<double> drop_negative_cost;
  std::optional<double> cost_bound;
};

void add_common(CLI::App& cmd, Common& c, bool with_costs) {
  cmd.add_option("--config", c.config, "Key = value config file");
  cmd.add_option("--corpus", c.corpus, "Corpus, one JSON case per line");
  cmd.add_option("--ontology", c.ontology, "Ontology, one 'child -> parent' per line");
  cmd.add_option("--akb", c.akb, "Adaptation knowledge base file");
  if (with_costs) {
    cmd.add_option("--generalize-cost", c.generalize_cost);
    cmd.add_option("--drop-negative-cost", c.drop_negative_cost);
    cmd.add_option("--cost-bound", c.cost_bound);
  }
}

// Config file, then ADAPTFORGE_* variables, then flags.
ServiceConfig resolve(const Common& c) {
  ServiceConfig cfg;
  if (!c.config.empty()) cfg = load_config(c.config);
  apply_env(cfg, [](const char* k) { return std::getenv(k); });
  if (!c.corpus.empty()) cfg.corpus = c.corpus;
  if (!c.ontology.empty()) cfg.ontology = c.ontology;
  if (!c.akb.empty()) cfg.akb = c.akb;
  if (c.generalize_cost) cfg.retrieval.generalize_cost = *c.generalize_cost;
  if (c.drop_negative_cost) cfg.retrieval.drop_negative_cost = *c.drop_negative_cost;
  if (c.cost_bound) cfg.retrieval.cost_bound = *c.cost_bound;
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
  f << text;
}

std::string bracketed(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
  return s + "]";
}

void print_session_text(const Session& s, std::ostream& out) {
  const Ontology& onto = s.engine().ontology();
  out << "target: " << render(*s.target(), onto) << '\n';
  if (s.failure()) {
    out << "no candidate: " << to_string(s.failure()->code) << ": " << s.failure()->message
        << '\n';
    return;
  }
  std::vector<std::string> sp, ap;
  for (const auto& q : s.similarity_path()->steps) sp.push_back(render(q, onto));
  for (std::size_t i = 0; i < s.adaptation_path().size(); ++i) {
    ap.push_back(render(s.adaptation_path().steps[i], onto) + " (" +
                 std::string(to_string(s.adaptation_path().origins[i])) + ")");
  }
  out << "similarity path: " << bracketed(sp) << '\n';
  out << "source: " << render(s.similarity_path()->source, onto) << '\n';
  out << "retrieved: " << s.retrieved()->id << '\n';
  out << "adaptation path: " << bracketed(ap) << '\n';
  out << "candidate: " << bracketed(codec::names(s.candidate()->atoms, onto)) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Case-based reasoning with adaptation knowledge discovery", "adaptforge"};
  app.require_subcommand(1);

  // ingest
  Common ingest_c;
  std::string policy = "strict";
  std::string ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a corpus and print its normal form");
  add_common(*ingest_cmd, ingest_c, false);
  ingest_cmd->add_option("--policy", policy, "Unknown atoms: strict or auto_add")
      ->check(CLI::IsMember({"strict", "auto_add"}));
  ingest_cmd->add_option("--out", ingest_out, "Write the normalized corpus here");

  // query
  Common query_c;
  std::vector<std::string> want, dont_want, types;
  bool as_json = false;
  auto* query_cmd = app.add_subcommand("query", "Retrieve and adapt a case for a query");
  add_common(*query_cmd, query_c, true);
  query_cmd->add_option("--want", want, "Wanted ingredient (repeatable)");
  query_cmd->add_option("--dont-want", dont_want, "Unwanted ingredient (repeatable)");
  query_cmd->add_option("--type", types, "Wanted dish type (repeatable)");
  query_cmd->add_flag("--json", as_json, "Print the session resource as JSON");

  // mine
  Common mine_c;
  std::string seed, mine_out;
  double min_supp = kDefaultMinSupport;
  std::size_t pair_cap = kDefaultPairCap;
  unsigned workers = 1;
  auto* mine_cmd = app.add_subcommand("mine", "Mine closed variations for a seed");
  add_common(*mine_cmd, mine_c, false);
  mine_cmd->add_option("--seed", seed, "Seed, e.g. \"oil=,peanut_oil-\"")->required();
  mine_cmd->add_option("--min-supp", min_supp, "Support threshold in (0, 1]");
  mine_cmd->add_option("--pair-cap", pair_cap, "Maximum number of case pairs");
  mine_cmd->add_option("--workers", workers, "Mining threads");
  mine_cmd->add_option("--out", mine_out, "Write the JSON result here");

  // akb
  auto* akb_cmd = app.add_subcommand("akb", "Inspect or extend the knowledge base");
  akb_cmd->require_subcommand(1);
  Common akb_show_c, akb_import_c;
  std::string import_from;
  auto* show_cmd = akb_cmd->add_subcommand("show", "Print the knowledge base");
  add_common(*show_cmd, akb_show_c, false);
  auto* import_cmd = akb_cmd->add_subcommand("import", "Append entries from another file");
  add_common(*import_cmd, akb_import_c, false);
  import_cmd->add_option("--from", import_from, "Knowledge base file to import")->required();

  // serve
  Common serve_c;
  std::optional<int> port;
  std::string host;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  add_common(*serve_cmd, serve_c, true);
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);

  // replay
  Common replay_c;
  std::string log_path, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a session event log");
  add_common(*replay_cmd, replay_c, true);
  replay_cmd->add_option("log", log_path, "Session log (JSON lines)")->required();
  replay_cmd->add_option("--out", replay_out, "Write the reconstructed reformulation here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest_cmd) {
      ServiceConfig cfg = resolve(ingest_c);
      if (cfg.corpus.empty() || cfg.ontology.empty()) {
        err << "ingest: --corpus and --ontology are required\n";
        return 2;
      }
      auto onto = std::make_shared<const Ontology>(load_ontology(read_file(cfg.ontology)));
      const CaseBase cb = ingest(read_file(cfg.corpus), onto,
                                 policy == "auto_add" ? UnknownAtomPolicy::kAutoAdd
                                                      : UnknownAtomPolicy::kStrict);
      if (!ingest_out.empty()) write_or_print(ingest_out, serialize(cb), out);
      out << codec::Json{{"cases", cb.size()},
                         {"atoms", cb.ontology().size()},
                         {"axioms", cb.ontology().axioms().size()}}
                 .dump()
          << '\n';
      return 0;
    }

    if (*query_cmd) {
      ServiceConfig cfg = resolve(query_c);
      Engine engine = make_engine(cfg);
      for (auto& t : types) want.push_back(t);
      const Conjunction tgt = codec::make_query(want, dont_want, engine.ontology());
      Session s("cli", engine);
      s.submit_query(tgt);
      if (as_json) {
        out << codec::to_json(s).dump(2) << '\n';
      } else {
        print_session_text(s, out);
      }
      return s.failure() ? 1 : 0;
    }

    if (*mine_cmd) {
      ServiceConfig cfg = resolve(mine_c);
      Engine engine = make_engine(cfg);
      const Variation v = parse_seed(seed, engine.ontology());
      const TrainingSet t = build_training_set(*engine.cb, v, pair_cap);
      if (t.empty()) {
        err << "advisory: no pair of cases matches the seed\n";
        write_or_print(mine_out, "[]\n", out);
        return 0;
      }
      const auto mined = mine_closed(t, min_supp, engine.ontology(), MiningConfig{workers});
      if (t.truncated)
        err << "note: training set truncated to " << t.size() << " of " << t.matching_pairs
            << " pairs\n";
      write_or_print(mine_out, codec::to_json(mined, engine.ontology()).dump(2) + "\n", out);
      return 0;
    }

    if (*show_cmd || *import_cmd) {
      const Common& c = *show_cmd ? akb_show_c : akb_import_c;
      ServiceConfig cfg = resolve(c);
      if (cfg.akb.empty() || cfg.ontology.empty()) {
        err << "akb: --akb and --ontology are required\n";
        return 2;
      }
      const Ontology onto = load_ontology(read_file(cfg.ontology));
      AdaptationKnowledgeBase akb;
      if (std::filesystem::exists(cfg.akb)) akb = load_akb(cfg.akb, onto);
      if (*show_cmd) {
        out << to_json_text(akb, onto);
        return 0;
      }
      const AdaptationKnowledgeBase incoming = load_akb(import_from, onto);
      std::size_t added = 0;
      for (const auto& e : incoming.entries()) added += akb.add(e) ? 1 : 0;
      save(akb, cfg.akb, onto);
      out << codec::Json{{"imported", added},
                         {"duplicates", incoming.size() - added},
                         {"version", akb.version()}}
                 .dump()
          << '\n';
      return 0;
    }

    if (*serve_cmd) {
      ServiceConfig cfg = resolve(serve_c);
      if (port) cfg.port = *port;
      if (!host.empty()) cfg.host = host;
      Service service(make_engine(cfg), options_from(cfg));
      err << "listening on " << cfg.host << ':' << cfg.port << '\n';
      if (!service.serve(cfg.host, cfg.port)) {
        err << "error: io_error: cannot listen on " << cfg.host << ':' << cfg.port << '\n';
        return 1;
      }
      return 0;
    }

    if (*replay_cmd) {
      ServiceConfig cfg = resolve(replay_c);
      std::string akb_path = cfg.akb;
      cfg.akb.clear();  // replay never writes the live knowledge base
      Engine engine = make_engine(cfg);
      AdaptationKnowledgeBase history;
      if (!akb_path.empty() && std::filesystem::exists(akb_path))
        history = load_akb(akb_path, engine.ontology());
      const Session s = replay(parse_event_log(read_file(log_path)), engine, history);
      codec::Json result{{"sessionId", s.id()}, {"state", to_string(s.state())}};
      result["stored"] = s.stored() ? codec::to_json(*s.stored(), engine.ontology())
                                    : codec::Json(nullptr);
      write_or_print(replay_out, result.dump(2) + "\n", out);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace adaptforge::cli
