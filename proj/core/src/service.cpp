#include "adaptforge/service.hpp"

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <semaphore>
#include <thread>

#include <httplib.h>

#include "adaptforge/codec.hpp"
#include "adaptforge/error.hpp"

namespace adaptforge {

using Json = nlohmann::ordered_json;

ServiceOptions options_from(const ServiceConfig& cfg) {
  ServiceOptions o;
  o.mining_wait_ms = cfg.mining_wait_ms;
  o.workers = cfg.workers;
  o.log_dir = cfg.log_dir;
  return o;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIllegalState: return 409;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kIoError: return 500;
    default: return 400;
  }
}

namespace {

Response error_response(const Error& e) {
  return {http_status(e.code()), Json{{"error", to_string(e.code())}, {"message", e.what()}}};
}

std::vector<std::string> split_path(std::string_view path) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    auto slash = path.find('/', pos);
    if (slash == std::string_view::npos) slash = path.size();
    if (slash > pos) parts.emplace_back(path.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return parts;
}

std::vector<std::string> string_list(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return {};
  if (!body[key].is_array())
    throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' must be a list of atoms");
  std::vector<std::string> out;
  for (const auto& v : body[key]) {
    if (!v.is_string())
      throw Error(ErrorCode::kInvalidArgument, std::string("'") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t index_field(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_number_integer() || body[key].get<long long>() < 0)
    throw Error(ErrorCode::kInvalidArgument,
                std::string("'") + key + "' must be a non-negative integer");
  return body[key].get<std::size_t>();
}

}  // namespace

struct Service::Impl {
  struct Entry {
    std::mutex mu;
    std::unique_ptr<Session> session;
    std::size_t persisted = 0;
  };
  struct Job {
    std::mutex mu;
    std::condition_variable cv;
    bool done = false;
    Response result;
    std::string session_id;
  };

  Impl(Engine e, ServiceOptions o)
      : engine(std::move(e)), opts(std::move(o)), sem(std::max(1u, opts.workers)),
        rng(std::random_device{}()) {
    if (!opts.log_dir.empty()) std::filesystem::create_directories(opts.log_dir);
  }

  ~Impl() {
    server.stop();
    std::unique_lock lock(active_mu);
    active_cv.wait(lock, [&] { return active == 0; });
  }

  Engine engine;
  ServiceOptions opts;
  std::counting_semaphore<1024> sem;

  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions;
  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>, std::less<>> jobs;
  std::mutex rng_mu;
  std::mt19937_64 rng;

  std::mutex active_mu;
  std::condition_variable active_cv;
  int active = 0;

  httplib::Server server;

  std::string fresh_id() {
    std::lock_guard lock(rng_mu);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
  }

  std::shared_ptr<Entry> find(std::string_view id) {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(id);
    if (it == sessions.end())
      throw Error(ErrorCode::kNotFound, "no session '" + std::string(id) + "'");
    return it->second;
  }

  // Appends the events not yet written; caller holds entry.mu.
  void persist(Entry& entry) {
    const auto& log = entry.session->log();
    if (opts.log_dir.empty() || entry.persisted == log.size()) return;
    const auto path = std::filesystem::path(opts.log_dir) / (entry.session->id() + ".jsonl");
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path.string());
    for (; entry.persisted < log.size(); ++entry.persisted)
      out << to_json_line(log[entry.persisted]) << '\n';
  }

  Response create() {
    auto entry = std::make_shared<Entry>();
    entry->session = std::make_unique<Session>(fresh_id(), engine, opts.clock);
    {
      std::lock_guard lock(entry->mu);
      persist(*entry);
    }
    const auto id = entry->session->id();
    Json body = codec::to_json(*entry->session);
    std::lock_guard lock(sessions_mu);
    sessions.emplace(id, std::move(entry));
    return {201, std::move(body)};
  }

  template <typename Op>
  Response with_session(std::string_view id, Op op) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    Session& s = *entry->session;
    try {
      op(s);
    } catch (const Error& e) {
      persist(*entry);
      Response r = error_response(e);
      r.body["state"] = to_string(s.state());
      return r;
    }
    persist(*entry);
    return {200, codec::to_json(s)};
  }

  Response mine(std::string_view id, const nlohmann::json& body) {
    std::optional<double> min_support;
    if (body.contains("minSupport") && !body["minSupport"].is_null()) {
      if (!body["minSupport"].is_number())
        throw Error(ErrorCode::kInvalidArgument, "'minSupport' must be a number");
      min_support = body["minSupport"].get<double>();
    }
    auto entry = find(id);
    DiscoveryJob job;
    {
      std::lock_guard lock(entry->mu);
      try {
        job = entry->session->prepare_discovery(min_support);
      } catch (const Error& e) {
        Response r = error_response(e);
        r.body["state"] = to_string(entry->session->state());
        return r;
      }
    }
    auto pending = std::make_shared<Job>();
    pending->session_id = std::string(id);
    const std::string token = fresh_id();
    {
      std::lock_guard lock(jobs_mu);
      jobs.emplace(token, pending);
    }
    {
      std::lock_guard lock(active_mu);
      ++active;
    }
    std::thread([this, pending, entry, job = std::move(job)] {
      Response r;
      sem.acquire();
      try {
        DiscoveryResult res = run_discovery_job(job);
        std::lock_guard lock(entry->mu);
        try {
          entry->session->commit_discovery(std::move(res));
          persist(*entry);
          r = {200, codec::to_json(*entry->session)};
        } catch (const Error& e) {
          r = error_response(e);
          r.body["state"] = to_string(entry->session->state());
        }
      } catch (const Error& e) {
        r = error_response(e);
      } catch (const std::exception& e) {
        r = {500, Json{{"error", "internal"}, {"message", e.what()}}};
      }
      sem.release();
      {
        std::lock_guard lock(pending->mu);
        pending->result = std::move(r);
        pending->done = true;
      }
      pending->cv.notify_all();
      std::lock_guard lock(active_mu);
      --active;
      active_cv.notify_all();
    }).detach();

    std::unique_lock lock(pending->mu);
    if (pending->cv.wait_for(lock, std::chrono::milliseconds(opts.mining_wait_ms),
                             [&] { return pending->done; })) {
      return pending->result;
    }
    return {202, Json{{"pollToken", token}, {"sessionId", std::string(id)}, {"status", "running"}}};
  }

  Response job_status(std::string_view token) {
    std::shared_ptr<Job> job;
    {
      std::lock_guard lock(jobs_mu);
      auto it = jobs.find(token);
      if (it == jobs.end())
        throw Error(ErrorCode::kNotFound, "no mining job '" + std::string(token) + "'");
      job = it->second;
    }
    std::lock_guard lock(job->mu);
    if (!job->done)
      return {202, Json{{"pollToken", std::string(token)}, {"sessionId", job->session_id},
                        {"status", "running"}}};
    return job->result;
  }

  Response route(std::string_view method, std::string_view path, std::string_view raw) {
    const auto parts = split_path(path);
    nlohmann::json body = nlohmann::json::object();
    if (raw.find_first_not_of(" \t\r\n") != std::string_view::npos) {
      try {
        body = nlohmann::json::parse(raw);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::kParseError, std::string("request body: ") + e.what());
      }
      if (!body.is_object())
        throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    }
    const Ontology& onto = engine.ontology();
    const bool get = method == "GET";
    const bool post = method == "POST";

    if (parts.size() == 1 && parts[0] == "healthz" && get) {
      return {200, Json{{"status", "ok"},
                        {"cases", engine.cb->size()},
                        {"akbVersion", engine.akb->snapshot()->version()}}};
    }
    if (parts.size() == 1 && parts[0] == "akb" && get)
      return {200, Json::parse(to_json_text(*engine.akb->snapshot(), onto))};
    if (parts.size() == 2 && parts[0] == "cases" && get)
      return {200, codec::to_json(engine.cb->at(parts[1]), onto)};
    if (parts.size() == 2 && parts[0] == "jobs" && get) return job_status(parts[1]);
    if (parts.size() == 1 && parts[0] == "sessions" && post) return create();

    if (parts.size() >= 2 && parts[0] == "sessions") {
      const std::string& id = parts[1];
      find(id);
      if (parts.size() == 2 && get) return with_session(id, [](Session&) {});
      if (parts.size() == 3 && parts[2] == "log" && get) {
        auto entry = find(id);
        std::lock_guard lock(entry->mu);
        Json events = Json::array();
        for (const auto& e : entry->session->log())
          events.push_back(Json::parse(to_json_line(e)));
        return {200, Json{{"sessionId", id}, {"events", std::move(events)}}};
      }
      if (parts.size() == 3 && post) {
        const std::string& op = parts[2];
        if (op == "query") {
          auto want = string_list(body, "wantIngredients");
          for (auto* key : {"wantTypes", "want", "types"})
            for (auto& a : string_list(body, key)) want.push_back(std::move(a));
          auto dont = string_list(body, "dontWantIngredients");
          for (auto& a : string_list(body, "dontWant")) dont.push_back(std::move(a));
          const Conjunction tgt = codec::make_query(want, dont, onto);
          return with_session(id, [&](Session& s) { s.submit_query(tgt); });
        }
        if (op == "feedback") {
          Feedback fb;
          fb.kind = parse_feedback_kind(body.value("kind", ""));
          if (fb.kind == Feedback::Kind::kStepInvalid) fb.step = index_field(body, "step");
          fb.note = body.value("note", "");
          return with_session(id, [&](Session& s) { s.feedback(fb); });
        }
        if (op == "diagnose") {
          if (!body.contains("verdicts") || !body["verdicts"].is_array())
            throw Error(ErrorCode::kInvalidArgument, "'verdicts' must be a list of booleans");
          std::vector<bool> verdicts;
          for (const auto& v : body["verdicts"]) {
            if (!v.is_boolean())
              throw Error(ErrorCode::kInvalidArgument, "'verdicts' must be a list of booleans");
            verdicts.push_back(v.get<bool>());
          }
          return with_session(id, [&](Session& s) { s.diagnose(verdicts); });
        }
        if (op == "repair") {
          RepairChoice c;
          c.strategy = parse_repair_strategy(body.value("strategy", ""));
          if (body.contains("step") && !body["step"].is_null()) c.step = index_field(body, "step");
          if (body.contains("parent") && body["parent"].is_string())
            c.parent = body["parent"].get<std::string>();
          c.seed = body.value("seed", "");
          return with_session(id, [&](Session& s) { s.configure_repair(c); });
        }
        if (op == "mine") return mine(id, body);
        if (op == "select") {
          const std::size_t index = index_field(body, "index");
          return with_session(id, [&](Session& s) { s.select(index); });
        }
        if (op == "validate") {
          const Decision d = parse_decision(body.value("decision", ""));
          const std::string validator = body.value("validator", "anonymous");
          return with_session(id, [&](Session& s) { s.validate(d, validator); });
        }
      }
    }
    if (!get && !post) return {405, Json{{"error", "method_not_allowed"}, {"message", std::string(method)}}};
    return {404, Json{{"error", "not_found"}, {"message", "no route " + std::string(method) + " " + std::string(path)}}};
  }
};

Service::Service(Engine engine, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(engine), std::move(options))) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
}

Service::~Service() = default;

Response Service::handle(std::string_view method, std::string_view path,
                         std::string_view body) {
  try {
    return impl_->route(method, path, body);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const nlohmann::json::exception& e) {
    return {400, Json{{"error", to_string(ErrorCode::kInvalidArgument)}, {"message", e.what()}}};
  } catch (const std::exception& e) {
    return {500, Json{{"error", "internal"}, {"message", e.what()}}};
  }
}

bool Service::serve(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int Service::bind_ephemeral(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool Service::serve_bound() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace adaptforge
