#include "clicklayout/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "clicklayout/error.hpp"
#include "clicklayout/interpreter.hpp"
#include "clicklayout/json_io.hpp"

namespace clicklayout {

using nlohmann::json;

namespace {

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(ms));
  return buf;
}

HistoryEntry entry_from_json(const json& j) {
  return {j.at("instruction").get<std::string>(), j.at("chain_of_thought").get<std::string>(),
          layout_from_json(j.at("before")), layout_from_json(j.at("after")),
          j.at("timestamp").get<std::string>()};
}

}  // namespace

json history_entry_to_json(const HistoryEntry& e) {
  return {{"instruction", e.instruction_text},
          {"chain_of_thought", e.chain_of_thought},
          {"before", layout_to_json(e.before)},
          {"after", layout_to_json(e.after)},
          {"timestamp", e.timestamp}};
}

json session_to_json(const Session& s) {
  json history = json::array();
  for (const auto& e : s.history) history.push_back(history_entry_to_json(e));
  return {{"session_id", s.id},
          {"initial", layout_to_json(s.initial)},
          {"layout", layout_to_json(s.current)},
          {"width", s.image.width},
          {"height", s.image.height},
          {"history", history}};
}

SessionManager::SessionManager(ServiceOptions options, std::unique_ptr<CompletionBackend> backend,
                               std::unique_ptr<CompletionBackend> fallback)
    : options_(std::move(options)), backend_(std::move(backend)), fallback_(std::move(fallback)) {
  if (!backend_) backend_ = make_backend(options_.backend);
  if (!fallback_ && options_.fallback) fallback_ = make_backend(*options_.fallback);
}

std::string SessionManager::now() const { return options_.clock ? options_.clock() : iso_now(); }

std::string SessionManager::fresh_id() {
  std::lock_guard lock(id_mu_);
  static std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::shared_ptr<SessionManager::Slot> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(table_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::kNotFound, "no session " + id);
  return it->second;
}

void SessionManager::journal(const std::string& id, const json& event) const {
  if (!options_.journal_dir) return;
  std::lock_guard lock(journal_mu_);
  std::filesystem::create_directories(*options_.journal_dir);
  std::ofstream out(*options_.journal_dir / (id + ".jsonl"), std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot append to journal for session " + id);
  out << event.dump() << '\n';
}

std::string SessionManager::create_session(const SceneGraph& initial, ImageSize image) {
  require_valid(initial, "initial layout");
  if (image.width <= 0 || image.height <= 0) {
    throw Error(ErrorKind::kArgument, "image dimensions must be positive");
  }
  auto slot = std::make_shared<Slot>();
  slot->session.initial = initial;
  slot->session.current = initial;
  slot->session.image = image;
  std::string id;
  {
    std::unique_lock lock(table_mu_);
    do {
      id = fresh_id();
    } while (sessions_.contains(id));
    slot->session.id = id;
    sessions_.emplace(id, slot);
  }
  journal(id, {{"event", "create"},
               {"session_id", id},
               {"layout", layout_to_json(initial)},
               {"width", image.width},
               {"height", image.height},
               {"timestamp", now()}});
  return id;
}

SceneGraph SessionManager::layout(const std::string& id) const {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session.current;
}

Session SessionManager::snapshot(const std::string& id) const {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session;
}

std::vector<HistoryEntry> SessionManager::history(const std::string& id) const {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  return slot->session.history;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(table_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

SessionManager::Outcome SessionManager::run_prompt(CompletionBackend& backend,
                                                   const SceneGraph& current,
                                                   const std::string& instruction_text,
                                                   double temperature) {
  const Prompt prompt = build_prompt(options_.store, current, instruction_text, options_.prompt);
  const std::string raw = backend.complete(prompt, temperature);
  LlmTurn turn = parse_llm_response(raw);
  return {canonicalize(turn.output_graph), std::move(turn.chain_of_thought)};
}

SessionManager::Outcome SessionManager::run(const SceneGraph& current,
                                            const std::string& instruction_text,
                                            double temperature) {
  if (options_.backend.kind != BackendKind::kOracle) {
    return run_prompt(*backend_, current, instruction_text, temperature);
  }
  // The oracle reads the same serialized text the model would see, so a
  // replay from history reproduces the result exactly.
  try {
    Interpretation result = interpret_instruction(current, parse_instruction_text(instruction_text));
    return {canonicalize(result.output), std::move(result.chain_of_thought)};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUnsupportedInstruction || !fallback_) throw;
  }
  return run_prompt(*fallback_, current, instruction_text, temperature);
}

EditResult SessionManager::apply_instruction(const std::string& id,
                                             const MultimodalInstruction& instruction) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  Session& s = slot->session;

  const MultimodalInstruction normalized =
      normalize_instruction(instruction, s.image.width, s.image.height);
  const std::string text = serialize_instruction(normalized);
  Outcome outcome = run(s.current, text, options_.backend.temperature);

  HistoryEntry entry{text, outcome.chain_of_thought, s.current, outcome.after, now()};
  EditResult result{outcome.after, outcome.chain_of_thought,
                    diff_scene_graphs(s.current, outcome.after)};
  journal(id, {{"event", "apply"}, {"entry", history_entry_to_json(entry)}});
  s.history.push_back(std::move(entry));
  s.current = std::move(outcome.after);
  return result;
}

EditResult SessionManager::apply_instruction_text(const std::string& id, std::string_view text) {
  return apply_instruction(id, parse_instruction_text(text));
}

EditResult SessionManager::reload_last(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  Session& s = slot->session;
  if (s.history.empty()) throw Error(ErrorKind::kPrecondition, "nothing to reload");

  const HistoryEntry& last = s.history.back();
  Outcome outcome = run(last.before, last.instruction_text, options_.backend.regeneration_temperature);

  HistoryEntry entry{last.instruction_text, outcome.chain_of_thought, last.before, outcome.after,
                     now()};
  EditResult result{outcome.after, outcome.chain_of_thought,
                    diff_scene_graphs(last.before, outcome.after)};
  journal(id, {{"event", "reload"}, {"entry", history_entry_to_json(entry)}});
  s.history.back() = std::move(entry);
  s.current = std::move(outcome.after);
  return result;
}

SceneGraph SessionManager::undo(const std::string& id) {
  auto slot = find(id);
  std::lock_guard lock(slot->mu);
  Session& s = slot->session;
  if (s.history.empty()) throw Error(ErrorKind::kPrecondition, "nothing to undo");
  journal(id, {{"event", "undo"}, {"timestamp", now()}});
  s.current = s.history.back().before;
  s.history.pop_back();
  return s.current;
}

std::string SessionManager::preview_svg(const std::string& id) const {
  return render_layout_preview(layout(id), options_.render);
}

GeneratedImage SessionManager::generate(const std::string& id) const {
  return request_generated_image(layout(id), options_.render);
}

std::size_t SessionManager::restore_from_journal(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) return 0;
  std::size_t restored = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.path().extension() == ".jsonl") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    auto slot = std::make_shared<Slot>();
    Session& s = slot->session;
    bool created = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        const json ev = json::parse(line);
        const std::string kind = ev.at("event").get<std::string>();
        if (kind == "create") {
          s.id = ev.at("session_id").get<std::string>();
          s.initial = layout_from_json(ev.at("layout"));
          s.current = s.initial;
          s.image = {ev.at("width").get<int>(), ev.at("height").get<int>()};
          created = true;
        } else if (!created) {
          throw Error(ErrorKind::kParse, "event before session creation");
        } else if (kind == "apply") {
          s.history.push_back(entry_from_json(ev.at("entry")));
          s.current = s.history.back().after;
        } else if (kind == "reload") {
          if (s.history.empty()) throw Error(ErrorKind::kParse, "reload with empty history");
          s.history.back() = entry_from_json(ev.at("entry"));
          s.current = s.history.back().after;
        } else if (kind == "undo") {
          if (s.history.empty()) throw Error(ErrorKind::kParse, "undo with empty history");
          s.current = s.history.back().before;
          s.history.pop_back();
        } else {
          throw Error(ErrorKind::kParse, "unknown journal event '" + kind + "'");
        }
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorKind::kParse, path.string() + ":" + std::to_string(line_no) + ": " +
                                           e.what());
      }
    }
    if (!created) continue;
    std::unique_lock lock(table_mu_);
    sessions_[s.id] = slot;
    ++restored;
  }
  return restored;
}

}  // namespace clicklayout
