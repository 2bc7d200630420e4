#include "clicklayout/http_api.hpp"

#include <httplib.h>

#include "clicklayout/json_io.hpp"
#include "clicklayout/render.hpp"

namespace clicklayout {

using nlohmann::json;

int http_status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kArgument: return 400;
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kPrecondition: return 409;
    case ErrorKind::kValidation:
    case ErrorKind::kNoMatch:
    case ErrorKind::kUnsupportedInstruction: return 422;
    case ErrorKind::kTransport:
    case ErrorKind::kUnknownPrompt:
    case ErrorKind::kExtraction:
    case ErrorKind::kGeneration:
    case ErrorKind::kProtocol: return 502;
    case ErrorKind::kIo: return 500;
  }
  return 500;
}

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view kind,
                const std::string& message, const std::string* raw = nullptr) {
  json body = {{"error", kind}, {"message", message}};
  if (raw) body["raw"] = *raw;
  send_json(res, body, status);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("request body is not JSON: ") + e.what(), e.byte);
  }
}

json edit_response(const EditResult& r) {
  return {{"layout", layout_to_json(r.after)},
          {"chain_of_thought", r.chain_of_thought},
          {"diff", diff_to_json(r.diff)}};
}

// Runs a handler and turns library errors into JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
  return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ExtractionError& e) {
      send_error(res, http_status_for(e.kind()), to_string(e.kind()), e.what(), &e.raw());
    } catch (const Error& e) {
      send_error(res, http_status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  };
}

}  // namespace

struct ApiServer::Impl {
  explicit Impl(SessionManager& s) : sessions(s) {}

  SessionManager& sessions;
  httplib::Server server;
  bool bound = false;
};

ApiServer::ApiServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  SessionManager& sm = sessions;
  const std::string id = R"(/sessions/([0-9A-Za-z_-]+))";

  srv.Post("/sessions", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const auto layout = body.find("layout");
             if (layout == body.end()) throw Error(ErrorKind::kArgument, "missing 'layout'");
             ImageSize size{body.value("width", 1000), body.value("height", 1000)};
             const std::string sid = sm.create_session(layout_from_json(*layout), size);
             send_json(res, {{"session_id", sid}}, 201);
           }));

  srv.Get(id + "/layout", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
            send_json(res, layout_to_json(sm.layout(req.matches[1])));
          }));

  srv.Post(id + "/instruction",
           guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             const json body = parse_body(req);
             const std::string sid = req.matches[1];
             if (auto text = body.find("instruction_text"); text != body.end()) {
               send_json(res, edit_response(sm.apply_instruction_text(sid, text->get<std::string>())));
             } else if (body.contains("tokens")) {
               send_json(res, edit_response(sm.apply_instruction(sid, instruction_from_json(body))));
             } else {
               throw Error(ErrorKind::kArgument, "expected 'instruction_text' or 'tokens'");
             }
           }));

  srv.Post(id + "/reload", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             send_json(res, edit_response(sm.reload_last(req.matches[1])));
           }));

  srv.Post(id + "/undo", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             send_json(res, {{"layout", layout_to_json(sm.undo(req.matches[1]))}});
           }));

  srv.Get(id + "/history", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
            json out = json::array();
            for (const auto& e : sm.history(req.matches[1])) out.push_back(history_entry_to_json(e));
            send_json(res, out);
          }));

  srv.Get(id + "/preview.svg",
          guarded([&sm](const httplib::Request& req, httplib::Response& res) {
            res.set_content(sm.preview_svg(req.matches[1]), "image/svg+xml");
          }));

  srv.Post(id + "/generate", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             GeneratedImage image;
             try {
               image = sm.generate(req.matches[1]);
             } catch (const GenerationError& e) {
               image = e.fallback();
               res.set_header("X-Clicklayout-Error", e.what());
             }
             res.set_header(std::string(kFallbackHeader), image.fallback ? "1" : "0");
             res.set_content(image.bytes, image.media_type);
           }));
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  impl_->bound = bound > 0;
  return bound;
}

void ApiServer::listen() {
  if (!impl_->bound) throw Error(ErrorKind::kPrecondition, "server is not bound");
  impl_->server.listen_after_bind();
}

void ApiServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace clicklayout
