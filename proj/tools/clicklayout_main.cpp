#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "clicklayout/config.hpp"
#include "clicklayout/error.hpp"
#include "clicklayout/http_api.hpp"
#include "clicklayout/json_io.hpp"
#include "clicklayout/prompt_engine.hpp"
#include "clicklayout/render.hpp"
#include "clicklayout/scene_graph.hpp"
#include "clicklayout/session.hpp"

using namespace clicklayout;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::cout << data;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << data;
}

struct BackendFlags {
  std::string kind;
  std::string endpoint;
  std::string model;
  std::string fixture;
  std::string examples;
  std::optional<double> temperature;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--backend", kind, "oracle, remote or fixture")
        ->check(CLI::IsMember({"oracle", "remote", "fixture"}));
    cmd->add_option("--endpoint", endpoint, "chat-completion URL for the remote backend");
    cmd->add_option("--model", model, "model id for the remote backend");
    cmd->add_option("--fixture", fixture, "fixture file for the fixture backend");
    cmd->add_option("--examples", examples, "example store JSON");
    cmd->add_option("--temperature", temperature, "sampling temperature");
  }

  void apply(AppConfig& config) const {
    if (!kind.empty()) config.backend.kind = *parse_backend_kind(kind);
    if (!endpoint.empty()) config.backend.endpoint = endpoint;
    if (!model.empty()) config.backend.model = model;
    if (!fixture.empty()) config.backend.fixture_path = fixture;
    if (!examples.empty()) config.examples = examples;
    if (temperature) config.backend.temperature = *temperature;
  }
};

AppConfig base_config(const std::string& config_path) {
  AppConfig config = config_path.empty() ? AppConfig{} : load_config_file(config_path);
  apply_environment(config);
  return config;
}

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layout editing from multimodal instructions"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  // edit
  auto* edit = app.add_subcommand("edit", "apply one instruction to a layout");
  std::string edit_layout, edit_instruction, edit_out;
  int width = 1000, height = 1000;
  BackendFlags edit_flags;
  edit->add_option("--layout", edit_layout, "input layout JSON")->required();
  edit->add_option("--instruction", edit_instruction, "instruction text")->required();
  edit->add_option("--out", edit_out, "output layout JSON (default stdout)");
  edit->add_option("--width", width, "image width in pixels for pixel references");
  edit->add_option("--height", height, "image height in pixels for pixel references");
  edit_flags.add_to(edit);

  // render
  auto* render = app.add_subcommand("render", "write an SVG or PNG preview of a layout");
  std::string render_layout, render_out;
  int canvas = 0;
  render->add_option("--layout", render_layout, "layout JSON")->required();
  render->add_option("--out", render_out, "output file; .png rasterizes")->required();
  render->add_option("--canvas", canvas, "canvas size in pixels");

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::optional<int> port;
  std::string host, journal_dir;
  BackendFlags serve_flags;
  serve->add_option("--port", port, "listen port (0 picks one)");
  serve->add_option("--host", host, "listen address");
  serve->add_option("--journal-dir", journal_dir, "enable per-session journals here");
  serve_flags.add_to(serve);

  // examples validate
  auto* examples = app.add_subcommand("examples", "example store tools");
  examples->require_subcommand(1);
  auto* validate = examples->add_subcommand("validate", "check an example store");
  std::string store_path;
  validate->add_option("store", store_path, "store JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*edit) {
      AppConfig config = base_config(config_path);
      edit_flags.apply(config);
      SessionManager sessions(make_service_options(config));
      const std::string id =
          sessions.create_session(parse_scene_graph(read_file(edit_layout)), {width, height});
      const EditResult result = sessions.apply_instruction_text(id, edit_instruction);
      std::cerr << result.chain_of_thought << '\n';
      write_output(edit_out, serialize_scene_graph(result.after) + "\n");
    } else if (*render) {
      AppConfig config = base_config(config_path);
      if (canvas > 0) config.render.canvas_width = config.render.canvas_height = canvas;
      const SceneGraph graph = parse_scene_graph(read_file(render_layout));
      const bool png = render_out.size() >= 4 && render_out.substr(render_out.size() - 4) == ".png";
      write_output(render_out, png ? rasterize_layout_preview(graph, config.render)
                                   : render_layout_preview(graph, config.render));
    } else if (*serve) {
      AppConfig config = base_config(config_path);
      serve_flags.apply(config);
      if (port) config.port = *port;
      if (!host.empty()) config.host = host;
      if (!journal_dir.empty()) config.journal_dir = journal_dir;
      SessionManager sessions(make_service_options(config));
      if (config.journal_dir) {
        const std::size_t n = sessions.restore_from_journal(*config.journal_dir);
        if (n > 0) std::cerr << "restored " << n << " sessions\n";
      }
      ApiServer server(sessions);
      const int bound = server.bind(config.host, config.port);
      if (bound < 0) {
        std::cerr << "error: cannot bind " << config.host << ":" << config.port << '\n';
        return 1;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << config.host << ":" << bound << '\n';
      server.listen();
      g_server = nullptr;
    } else if (*validate) {
      const ExampleStore store = load_example_store(store_path);
      std::cout << "ok: " << store.examples.size() << " examples\n";
    }
  } catch (const ExtractionError& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n--- raw ---\n"
              << e.raw() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  }
  return 0;
}
