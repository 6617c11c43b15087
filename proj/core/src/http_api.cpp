#include "sitext/http_api.hpp"

#include "httplib.h"
#include "json.hpp"
#include "sitext/error.hpp"

namespace sitext {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::precondition:
      return 409;
    case ErrorCode::io:
      return 500;
  }
  return 500;
}

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::precondition: return "precondition_failed";
    case ErrorCode::io: return "io_error";
  }
  return "internal";
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  reply(res, status, json{{"code", code}, {"message", message}});
}

json layout_json(const Layout2D& layout) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < layout.positions.rows(); ++i) {
    rows.push_back({layout.positions(i, 0), layout.positions(i, 1)});
  }
  return rows;
}

json pinned_json(const std::vector<Move>& pinned) {
  json out = json::array();
  for (const Move& p : pinned) out.push_back({{"doc_id", p.doc_id}, {"x", p.target.x()}, {"y", p.target.y()}});
  return out;
}

json top_weights_json(const std::vector<TopWeight>& top) {
  json out = json::array();
  for (const TopWeight& t : top) {
    json entry{{"dimension", t.dimension}, {"weight", t.weight}};
    if (!t.tokens.empty()) entry["tokens"] = t.tokens;
    out.push_back(std::move(entry));
  }
  return out;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed JSON body: ") + e.what());
  }
}

InteractionBatch parse_batch(const json& body) {
  auto moves = body.find("moves");
  if (moves == body.end() || !moves->is_array()) {
    throw Error(ErrorCode::invalid_argument, "\"moves\" must be an array");
  }
  InteractionBatch batch;
  for (const json& m : *moves) {
    if (!m.is_object() || !m.contains("doc_id") || !m["doc_id"].is_string() || !m.contains("x") ||
        !m["x"].is_number() || !m.contains("y") || !m["y"].is_number()) {
      throw Error(ErrorCode::invalid_argument, "each move needs a string doc_id and numeric x, y");
    }
    batch.moves.push_back({m["doc_id"].get<std::string>(), {m["x"].get<double>(), m["y"].get<double>()}});
  }
  return batch;
}

}  // namespace

struct HttpService::Impl {
  explicit Impl(SessionManager& s) : sessions(s) {}

  SessionManager& sessions;
  httplib::Server server;

  json snapshot_json(const SessionSnapshot& s) const {
    const WeightsDigest d = digest(s.weights);
    const Corpus& corpus = sessions.corpus(s.corpus);
    json docs = json::array();
    for (const std::string& id : s.layout.doc_ids) {
      const Document* doc = corpus.find(id);
      json entry{{"id", id}};
      if (doc && doc->label) entry["label"] = *doc->label;
      docs.push_back(std::move(entry));
    }
    return json{{"session_id", s.session_id},
                {"corpus", s.corpus},
                {"feature_mode", std::string(to_string(s.feature_mode))},
                {"revision", s.revision},
                {"doc_ids", s.layout.doc_ids},
                {"layout", layout_json(s.layout)},
                {"pinned", pinned_json(s.pinned)},
                {"weights_digest",
                 {{"dims", d.dims}, {"min", d.min}, {"max", d.max}, {"entropy", d.entropy}, {"checksum", d.checksum}}},
                {"top_weights", top_weights_json(s.top_weights)},
                {"approximate", s.feature_mode == FeatureMode::keyword_hashed},
                {"documents", std::move(docs)}};
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        reply_error(res, status_for(e.code()), code_name(e.code()), e.what());
      } catch (const json::exception& e) {
        reply_error(res, 400, "invalid_argument", e.what());
      } catch (const std::exception& e) {
        reply_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      const std::string corpus = body.value("corpus", std::string());
      const std::string mode = body.value("feature_mode", std::string("keyword"));
      const std::string id = sessions.create_session(corpus, parse_feature_mode(mode));
      reply(res, 201, json{{"session_id", id}, {"revision", 0}});
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      reply(res, 200, snapshot_json(*sessions.get_state(req.matches[1].str())));
    }));

    server.Post(R"(/sessions/([^/]+)/interactions)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const InteractionBatch batch = parse_batch(parse_body(req));
                  const LayoutUpdate update = sessions.apply_interaction(req.matches[1].str(), batch);
                  reply(res, 200,
                        json{{"revision", update.state->revision},
                             {"doc_ids", update.state->layout.doc_ids},
                             {"layout", layout_json(update.state->layout)},
                             {"top_weights", top_weights_json(update.state->top_weights)},
                             {"approximate", update.approximate},
                             {"replayed", update.replayed}});
                }));

    server.Post(R"(/sessions/([^/]+)/release)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parse_body(req);
      auto ids = body.find("doc_ids");
      if (ids == body.end() || !ids->is_array()) {
        throw Error(ErrorCode::invalid_argument, "\"doc_ids\" must be an array");
      }
      const auto doc_ids = ids->get<std::vector<std::string>>();
      const auto state = sessions.release(req.matches[1].str(), doc_ids);
      reply(res, 200, json{{"revision", state->revision}, {"pinned", pinned_json(state->pinned)}});
    }));

    server.Post(R"(/sessions/([^/]+)/reset)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto state = sessions.reset(req.matches[1].str());
      reply(res, 200, json{{"revision", state->revision},
                           {"doc_ids", state->layout.doc_ids},
                           {"layout", layout_json(state->layout)}});
    }));

    server.Get(R"(/corpus/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string corpus = req.has_param("corpus") ? req.get_param_value("corpus") : std::string();
      const Document& doc = sessions.document(req.matches[1].str(), corpus);
      json body{{"id", doc.id}, {"text", doc.text}};
      if (doc.label) body["label"] = *doc.label;
      reply(res, 200, body);
    }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        reply_error(res, res.status, res.status == 404 ? "not_found" : "http_error", "no such endpoint");
      }
    });
  }
};

HttpService::HttpService(SessionManager& sessions, HttpOptions options)
    : impl_(std::make_unique<Impl>(sessions)) {
  impl_->routes();
  if (!options.static_dir.empty() && !impl_->server.set_mount_point("/", options.static_dir.string())) {
    throw Error(ErrorCode::io, "cannot serve static files from " + options.static_dir.string());
  }
}

HttpService::~HttpService() = default;

int HttpService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpService::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpService::stop() { impl_->server.stop(); }
bool HttpService::is_running() const { return impl_->server.is_running(); }
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sitext
