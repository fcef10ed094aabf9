#include "leafscan/service.hpp"

#include "leafscan/atomic_file.hpp"
#include "leafscan/codec.hpp"
#include "leafscan/error.hpp"
#include "leafscan/render.hpp"

#include <iostream>
#include <random>

namespace fs = std::filesystem;

namespace leafscan::service {
namespace {

Reply error_reply(int status, std::string_view message) {
  return Reply{status, Json{{"error", message}}};
}

std::string new_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  static const char *hex = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 4; ++i) {
    auto v = rd();
    for (int k = 0; k < 8; ++k, v >>= 4) {
      id += hex[v & 0xF];
    }
  }
  return id;
}

Json parse_body(const std::string &body, std::string_view what) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error &e) {
    throw DocumentError(std::string(what) + ": malformed JSON body");
  }
}

// Either {"points": [[x,y],[x,y],[x,y]]} or the bare array.
QuadraticBezier curve_from_body(const Json &j) {
  if (j.is_object()) {
    if (!j.contains("points")) {
      throw DocumentError("curve body needs 'points'");
    }
    return curve_from_json(j.at("points"));
  }
  return curve_from_json(j);
}

std::string base_content_type(const std::string &ct) {
  auto s = ct.substr(0, ct.find(';'));
  while (!s.empty() && s.back() == ' ') {
    s.pop_back();
  }
  return s;
}

} // namespace

std::string_view to_string(SessionState s) noexcept {
  return s == SessionState::Ready ? "ready" : "needs_threshold";
}

SessionStore::SessionStore(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    load_all();
  }
}

std::shared_ptr<Session> SessionStore::find(const std::string &id) const {
  std::lock_guard lock(map_lock_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(map_lock_);
  return sessions_.size();
}

void SessionStore::recompute(Session &s) const {
  try {
    s.result = analyze_lab(s.lab, s.config, s.curves);
    s.state = SessionState::Ready;
    s.state_message.clear();
  } catch (const UniformImageError &e) {
    s.result.reset();
    s.state = SessionState::NeedsThreshold;
    s.state_message = std::string("needs manual threshold: ") + e.what();
  }
}

Json SessionStore::session_document(const Session &s) const {
  auto j = leafscan::session_document(s.id, s.revision, to_string(s.state), s.state_message, s.config, s.curves,
                                      s.result ? &*s.result : nullptr);
  j["width"] = s.image.width();
  j["height"] = s.image.height();
  return j;
}

Json SessionStore::result_document(const Session &s) const {
  Json j = make_document("result");
  j["id"] = s.id;
  j["revision"] = s.revision;
  j["state"] = to_string(s.state);
  j["message"] = s.state_message.empty() ? Json(nullptr) : Json(s.state_message);
  j["result"] = s.result ? result_to_json(*s.result) : Json(nullptr);
  return j;
}

void SessionStore::persist(const Session &s) const {
  if (!dir_) {
    return;
  }
  const auto d = *dir_ / s.id;
  fs::create_directories(d);
  if (!fs::exists(d / "image.bin")) {
    write_file_atomic(d / "image.bin", std::span<const std::uint8_t>(s.image_bytes));
  }
  auto doc = session_document(s);
  doc["content_type"] = s.content_type;
  write_file_atomic(d / "session.json", doc.dump(2) + "\n");
}

void SessionStore::load_all() {
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  for (const auto &entry : fs::directory_iterator(*dir_, ec)) {
    const auto doc_path = entry.path() / "session.json";
    if (!entry.is_directory() || !fs::exists(doc_path)) {
      continue;
    }
    try {
      const auto doc = parse_document(read_text_file(doc_path), doc_path.string(), "session");
      auto s = std::make_shared<Session>();
      s->id = doc.at("id").get<std::string>();
      s->image_bytes = read_file(entry.path() / "image.bin");
      s->content_type = doc.value("content_type", std::string("image/png"));
      s->image = decode_image(s->image_bytes, (entry.path() / "image.bin").string());
      s->lab = rgb_to_lab(s->image);
      merge_config(s->config, doc.at("config"));
      for (const auto &c : doc.at("curves")) {
        s->curves.push_back(curve_from_json(c));
      }
      s->revision = doc.at("revision").get<std::uint64_t>();
      recompute(*s);
      sessions_.emplace(s->id, std::move(s));
    } catch (const std::exception &e) {
      std::cerr << "skipping stored session " << entry.path().string() << ": " << e.what() << '\n';
    }
  }
}

void SessionStore::flush() const {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(map_lock_);
    for (const auto &[id, s] : sessions_) {
      all.push_back(s);
    }
  }
  for (const auto &s : all) {
    std::shared_lock lock(s->lock);
    persist(*s);
  }
}

Reply SessionStore::create(std::vector<std::uint8_t> bytes, const std::string &content_type) {
  const auto ct = base_content_type(content_type);
  if (ct != "image/png" && ct != "image/tiff" && ct != "application/octet-stream" && !ct.empty()) {
    return error_reply(415, "unsupported content type '" + ct + "'; expected image/png or image/tiff");
  }
  if (bytes.empty()) {
    return error_reply(400, "empty image body");
  }
  auto s = std::make_shared<Session>();
  try {
    s->image = decode_image(bytes, "upload");
  } catch (const UnsupportedFormatError &e) {
    return error_reply(415, e.what());
  } catch (const Error &e) {
    return error_reply(400, e.what());
  }
  s->id = new_id();
  s->image_bytes = std::move(bytes);
  s->content_type = ct.empty() ? "application/octet-stream" : ct;
  s->lab = rgb_to_lab(s->image);
  recompute(*s);
  try {
    persist(*s);
  } catch (const std::exception &e) {
    return error_reply(500, e.what());
  }
  auto body = session_document(*s);
  {
    std::lock_guard lock(map_lock_);
    sessions_.emplace(s->id, s);
  }
  return Reply{201, std::move(body)};
}

Reply SessionStore::get_session(const std::string &id) const {
  const auto s = find(id);
  if (!s) {
    return error_reply(404, "unknown session '" + id + "'");
  }
  std::shared_lock lock(s->lock);
  return Reply{200, session_document(*s)};
}

Reply SessionStore::get_result(const std::string &id) const {
  const auto s = find(id);
  if (!s) {
    return error_reply(404, "unknown session '" + id + "'");
  }
  std::shared_lock lock(s->lock);
  return Reply{200, result_document(*s)};
}

Reply SessionStore::update_config(const std::string &id, const std::string &body) {
  const auto s = find(id);
  if (!s) {
    return error_reply(404, "unknown session '" + id + "'");
  }
  std::unique_lock lock(s->lock);
  AnalysisConfig next = s->config;
  try {
    merge_config(next, parse_body(body, "config"));
  } catch (const Error &e) {
    return error_reply(400, e.what());
  }
  s->config = next;
  recompute(*s);
  ++s->revision;
  persist(*s);
  return Reply{200, session_document(*s)};
}

Reply SessionStore::add_curve(const std::string &id, const std::string &body) {
  const auto s = find(id);
  if (!s) {
    return error_reply(404, "unknown session '" + id + "'");
  }
  QuadraticBezier curve;
  try {
    curve = curve_from_body(parse_body(body, "curve"));
  } catch (const Error &e) {
    return error_reply(400, e.what());
  }
  std::unique_lock lock(s->lock);
  if (s->state != SessionState::Ready) {
    return error_reply(409, "session needs a manual threshold before curves can be placed");
  }
  auto curves = s->curves;
  curves.push_back(curve);
  auto result = analyze_lab(s->lab, s->config, curves);
  const auto outcome = result.closure.curves.back();
  if (outcome.status == CurveStatus::Rejected) {
    auto j = session_document(*s);
    j["curve"] = to_json(outcome);
    return Reply{200, std::move(j)};
  }
  s->curves = std::move(curves);
  s->result = std::move(result);
  ++s->revision;
  persist(*s);
  auto j = session_document(*s);
  j["curve"] = to_json(outcome);
  return Reply{200, std::move(j)};
}

Reply SessionStore::remove_curve(const std::string &id, std::size_t index) {
  const auto s = find(id);
  if (!s) {
    return error_reply(404, "unknown session '" + id + "'");
  }
  std::unique_lock lock(s->lock);
  if (index >= s->curves.size()) {
    return error_reply(404, "no curve " + std::to_string(index) + " (session has " +
                                std::to_string(s->curves.size()) + ")");
  }
  s->curves.erase(s->curves.begin() + static_cast<std::ptrdiff_t>(index));
  recompute(*s);
  ++s->revision;
  persist(*s);
  return Reply{200, session_document(*s)};
}

std::optional<std::vector<std::uint8_t>> SessionStore::preview(const std::string &id, const std::string &layer,
                                                               Reply &error) const {
  const auto s = find(id);
  if (!s) {
    error = error_reply(404, "unknown session '" + id + "'");
    return std::nullopt;
  }
  if (layer != "original" && layer != "mask" && layer != "annotated") {
    error = error_reply(400, "unknown layer '" + layer + "'; expected original, mask or annotated");
    return std::nullopt;
  }
  std::shared_lock lock(s->lock);
  if (layer == "original") {
    return encode_png(s->image);
  }
  if (!s->result) {
    error = error_reply(409, s->state_message);
    return std::nullopt;
  }
  if (layer == "mask") {
    return encode_png(mask_to_image(s->result->leaf_mask()));
  }
  return encode_png(annotate(s->image, *s->result));
}

} // namespace leafscan::service
