#ifndef UMBRA_SERVICE_H_
#define UMBRA_SERVICE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <unordered_map>

#include "umbra/image.h"
#include "umbra/params.h"
#include "umbra/pipeline.h"
#include "umbra/strokes.h"

namespace httplib {
class Server;
}

namespace umbra {

inline constexpr std::size_t kMaxUploadBytes = 20u << 20;

struct ServiceConfig {
  int port = 8080;
  std::size_t max_sessions = 64;
  std::chrono::seconds idle_timeout{30 * 60};
  ParamVector params;  // used when a removal request names none
  int removal_workers = 2;
};

// Reads UMBRA_PORT, UMBRA_MAX_SESSIONS and UMBRA_PARAMS_PATH.
ServiceConfig ConfigFromEnv();

// Transport-independent reply.
struct Reply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::string etag;  // empty when not cacheable
};

enum class SessionState { kEmpty, kDetected, kRemoved };

// Session store and request handlers. Every handler is safe to call from
// many threads. Requests on one session serialize on its mutex, except
// that a removal computes outside the lock on a snapshot of the strokes.
class SessionService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionService(ServiceConfig config, Clock clock = nullptr);

  Reply CreateSession(const std::string& image_bytes);
  Reply AddStrokes(const std::string& id, const std::string& delta_json);
  Reply GetStrokes(const std::string& id);
  Reply RunRemoval(const std::string& id, const std::string& options_json);
  // kind: mask, fusion, sparse, dense, result, original. A matching
  // `if_none_match` yields 304 with an empty body.
  Reply GetArtifact(const std::string& id, const std::string& kind,
                    const std::string& if_none_match = "");
  Reply DeleteSession(const std::string& id);

  std::size_t SessionCount();
  const ServiceConfig& config() const { return config_; }

 private:
  struct Removal {
    RasterImage fusion;
    SparseScaleField sparse;
    ScaleField dense;
    std::string result_png;
  };
  struct Session {
    std::mutex mu;
    std::string id;
    RasterImage image;
    StrokeSet strokes;
    std::optional<Mask> mask;
    std::uint64_t revision = 0;  // bumped on every accepted stroke delta
    SessionState state = SessionState::kEmpty;
    // Keyed by revision, color-correction flag and parameter JSON.
    std::map<std::string, std::shared_ptr<const Removal>> cache;
    std::shared_ptr<const Removal> latest;  // for the current revision only
    std::string latest_key;
    std::chrono::steady_clock::time_point used;
  };

  std::shared_ptr<Session> Find(const std::string& id);
  void EvictIdle();
  std::string NewId();

  ServiceConfig config_;
  Clock clock_;
  std::mutex mu_;
  std::list<std::string> lru_;  // most recent first
  std::unordered_map<std::string, std::pair<std::shared_ptr<Session>,
                                            std::list<std::string>::iterator>>
      sessions_;
  std::uint64_t counter_ = 0;
  std::counting_semaphore<> workers_;
};

// Registers the HTTP routes on `server`.
void MountRoutes(httplib::Server& server, SessionService& service);

}  // namespace umbra

#endif  // UMBRA_SERVICE_H_
