#pragma once

#include "leafscan/document.hpp"
#include "leafscan/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace leafscan::service {

enum class SessionState { Ready, NeedsThreshold };

/// Outcome of a service call: HTTP status plus JSON body.
struct Reply {
  int status = 200;
  Json body;
};

/// One expert's work on one image. Mutations are serialized by the owning
/// store; cached artifacts always match (image, config, curves) at `revision`.
struct Session {
  std::string id;
  std::vector<std::uint8_t> image_bytes;
  std::string content_type;
  RasterImage image{1, 1};
  LabImage lab{1, 1};
  AnalysisConfig config;
  std::vector<QuadraticBezier> curves;
  std::uint64_t revision = 0;
  SessionState state = SessionState::Ready;
  std::string state_message;
  std::optional<AnalysisResult> result;

  mutable std::shared_mutex lock;
};

/// In-memory sessions, optionally persisted under a store directory
/// (<dir>/<id>/image.bin + session.json).
class SessionStore {
public:
  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt);

  Reply create(std::vector<std::uint8_t> bytes, const std::string &content_type);
  Reply get_session(const std::string &id) const;
  Reply get_result(const std::string &id) const;
  Reply update_config(const std::string &id, const std::string &body);
  Reply add_curve(const std::string &id, const std::string &body);
  Reply remove_curve(const std::string &id, std::size_t index);

  /// PNG bytes of a preview layer (original, mask, annotated); nullopt plus
  /// an error reply when unavailable.
  std::optional<std::vector<std::uint8_t>> preview(const std::string &id, const std::string &layer,
                                                  Reply &error) const;

  std::size_t size() const;
  /// Writes every session document; used on shutdown.
  void flush() const;

private:
  std::shared_ptr<Session> find(const std::string &id) const;
  void recompute(Session &s) const;
  void persist(const Session &s) const;
  void load_all();
  Json session_document(const Session &s) const;
  Json result_document(const Session &s) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex map_lock_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

std::string_view to_string(SessionState s) noexcept;

/// Registers every endpoint of the HTTP contract on `server`.
void register_routes(httplib::Server &server, SessionStore &store);

} // namespace leafscan::service
