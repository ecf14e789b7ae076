#include "umbra/service.h"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <random>
#include <sstream>

#include "umbra/detect.h"
#include "umbra/image_io.h"

namespace umbra {
namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxConflictsListed = 1000;

std::string Bytes2String(const Bytes& b) { return std::string(b.begin(), b.end()); }

Reply Json(int status, const json& body) {
  return {status, "application/json", body.dump(), ""};
}

Reply Failure(int status, const std::string& code, const std::string& message,
              json extra = json::object()) {
  extra["error"] = code;
  extra["message"] = message;
  return Json(status, extra);
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return 500;
    case ErrorCode::kConflictingStrokes: return 409;
    case ErrorCode::kInsufficientStrokes:
    case ErrorCode::kNoShadow:
    case ErrorCode::kNoScales:
    case ErrorCode::kNoValidSamples:
    case ErrorCode::kDegenerateFusion:
    case ErrorCode::kDegenerateSample:
      return 422;
    default: return 400;
  }
}

Reply FromError(const Error& e) {
  return Failure(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
}

Reply NotFound(const std::string& what) { return Failure(404, "not-found", what); }

std::string ArtifactUrl(const std::string& id, const std::string& kind) {
  return "/sessions/" + id + "/artifacts/" + kind;
}

std::string Quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ServiceConfig ConfigFromEnv() {
  ServiceConfig c;
  if (const char* p = std::getenv("UMBRA_PORT")) {
    const int port = std::atoi(p);
    if (port <= 0 || port > 65535) throw Error(ErrorCode::kInvalidParameter, "bad UMBRA_PORT");
    c.port = port;
  }
  if (const char* m = std::getenv("UMBRA_MAX_SESSIONS")) {
    const long n = std::atol(m);
    if (n < 1) throw Error(ErrorCode::kInvalidParameter, "bad UMBRA_MAX_SESSIONS");
    c.max_sessions = static_cast<std::size_t>(n);
  }
  if (const char* path = std::getenv("UMBRA_PARAMS_PATH")) {
    if (*path) c.params = LoadParams(path);
  }
  return c;
}

SessionService::SessionService(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock([] { return std::chrono::steady_clock::now(); })),
      workers_(std::max(1, config_.removal_workers)) {
  config_.params.Validate();
  if (config_.max_sessions < 1) {
    throw Error(ErrorCode::kInvalidParameter, "max_sessions must be >= 1");
  }
}

std::string SessionService::NewId() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << rng() << "-" << ++counter_;
  return os.str();
}

void SessionService::EvictIdle() {
  const auto now = clock_();
  while (!lru_.empty()) {
    auto it = sessions_.find(lru_.back());
    if (now - it->second.first->used < config_.idle_timeout) break;
    sessions_.erase(it);
    lru_.pop_back();
  }
}

std::shared_ptr<SessionService::Session> SessionService::Find(const std::string& id) {
  std::lock_guard lock(mu_);
  EvictIdle();
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  lru_.splice(lru_.begin(), lru_, it->second.second);
  it->second.first->used = clock_();
  return it->second.first;
}

std::size_t SessionService::SessionCount() {
  std::lock_guard lock(mu_);
  EvictIdle();
  return sessions_.size();
}

Reply SessionService::CreateSession(const std::string& image_bytes) {
  if (image_bytes.size() > kMaxUploadBytes) {
    return Failure(413, "payload-too-large", "uploads are limited to 20 MB");
  }
  auto session = std::make_shared<Session>();
  try {
    const auto* p = reinterpret_cast<const std::uint8_t*>(image_bytes.data());
    session->image = DecodeImage({p, image_bytes.size()}, 3);
  } catch (const Error& e) {
    return Failure(400, "invalid-image", e.what());
  }
  std::lock_guard lock(mu_);
  EvictIdle();
  session->id = NewId();
  session->used = clock_();
  lru_.push_front(session->id);
  sessions_[session->id] = {session, lru_.begin()};
  while (sessions_.size() > config_.max_sessions) {
    sessions_.erase(lru_.back());
    lru_.pop_back();
  }
  return Json(201, {{"id", session->id},
                    {"width", session->image.width()},
                    {"height", session->image.height()}});
}

Reply SessionService::AddStrokes(const std::string& id, const std::string& delta_json) {
  auto s = Find(id);
  if (!s) return NotFound("unknown session " + id);
  StrokeSet delta;
  try {
    delta = ParseStrokes(delta_json);
  } catch (const Error& e) {
    return FromError(e);
  }
  std::lock_guard lock(s->mu);
  StrokeSet merged = s->strokes;
  merged.Append(delta);
  const int w = s->image.width();
  const int h = s->image.height();
  try {
    CheckStrokeBounds(delta, w, h);
    const std::vector<std::size_t> conflicts = StrokeConflicts(merged, w, h);
    if (!conflicts.empty()) {
      json px = json::array();
      for (std::size_t k = 0; k < conflicts.size() && k < kMaxConflictsListed; ++k) {
        px.push_back({conflicts[k] % w, conflicts[k] / w});
      }
      return Failure(409, ErrorCodeName(ErrorCode::kConflictingStrokes),
                     "shadow and lit strokes overlap",
                     {{"conflict_count", conflicts.size()}, {"conflict_pixels", px}});
    }
  } catch (const Error& e) {
    return FromError(e);
  }
  if (!merged.HasLabel(StrokeLabel::kShadow) || !merged.HasLabel(StrokeLabel::kLit)) {
    // Kept so that the missing label can arrive in a later delta.
    s->strokes = std::move(merged);
    ++s->revision;
    return Failure(422, ErrorCodeName(ErrorCode::kInsufficientStrokes),
                   "both shadow and lit strokes are required before the first detection",
                   {{"stroke_count", s->strokes.strokes.size()}});
  }
  Mask mask;
  try {
    mask = DetectMask(s->image, merged, config_.params.h1);
  } catch (const Error& e) {
    return FromError(e);
  }
  s->strokes = std::move(merged);
  s->mask = std::move(mask);
  ++s->revision;
  s->state = SessionState::kDetected;
  s->latest.reset();
  s->latest_key.clear();
  return Json(200, {{"mask_url", ArtifactUrl(id, "mask")},
                    {"shadow_pixel_count", s->mask->Count()},
                    {"revision", s->revision}});
}

Reply SessionService::GetStrokes(const std::string& id) {
  auto s = Find(id);
  if (!s) return NotFound("unknown session " + id);
  std::lock_guard lock(s->mu);
  return {200, "application/json", StrokesToJson(s->strokes), ""};
}

Reply SessionService::RunRemoval(const std::string& id, const std::string& options_json) {
  auto s = Find(id);
  if (!s) return NotFound("unknown session " + id);

  RemovalOptions options;
  ParamVector params = config_.params;
  try {
    const json body = options_json.empty() ? json::object() : json::parse(options_json);
    if (!body.is_object()) throw Error(ErrorCode::kInvalidInput, "body must be an object");
    if (body.contains("no_color_correct")) {
      options.color_correct = !body.at("no_color_correct").get<bool>();
    }
    if (body.contains("params")) {
      json merged = json::parse(ParamsToJson(params));
      merged.update(body.at("params"));
      params = ParseParams(merged.dump());
    }
  } catch (const Error& e) {
    return FromError(e);
  } catch (const json::exception& e) {
    return Failure(400, ErrorCodeName(ErrorCode::kInvalidInput), e.what());
  }

  RasterImage image;
  StrokeSet strokes;
  Mask mask;
  std::uint64_t revision = 0;
  std::string key;
  {
    std::lock_guard lock(s->mu);
    if (s->state == SessionState::kEmpty || !s->mask) {
      return Failure(409, "not-detected", "add shadow and lit strokes before removal");
    }
    revision = s->revision;
    key = std::to_string(revision) + (options.color_correct ? "|cc|" : "|raw|") +
          ParamsToJson(params);
    auto hit = s->cache.find(key);
    if (hit != s->cache.end()) {
      s->latest = hit->second;
      s->latest_key = key;
      s->state = SessionState::kRemoved;
      return Json(200, {{"result_url", ArtifactUrl(id, "result")}, {"cached", true},
                        {"revision", revision}});
    }
    image = s->image;
    strokes = s->strokes;
    mask = *s->mask;
  }

  auto removal = std::make_shared<Removal>();
  try {
    workers_.acquire();
    struct Release {
      std::counting_semaphore<>& sem;
      ~Release() { sem.release(); }
    } release{workers_};
    // The session mask was detected with the service's h1; detect again
    // when the request overrides it so the result matches the CLI.
    if (params.h1 != config_.params.h1) mask = DetectMask(image, strokes, params.h1);
    FusionResult fusion = BuildFusionImage(image, strokes, params.h2);
    RemovalResult r = RemoveShadowWithMask(image, std::move(mask), std::move(fusion.image),
                                           params, options);
    removal->fusion = std::move(r.fusion);
    removal->sparse = std::move(r.sparse);
    removal->dense = std::move(r.dense);
    removal->result_png = Bytes2String(EncodePng(r.result));
  } catch (const Error& e) {
    return FromError(e);
  }

  std::lock_guard lock(s->mu);
  s->cache[key] = removal;
  if (s->revision == revision) {
    s->latest = removal;
    s->latest_key = key;
    s->state = SessionState::kRemoved;
  }
  return Json(200, {{"result_url", ArtifactUrl(id, "result")}, {"cached", false},
                    {"revision", revision}});
}

Reply SessionService::GetArtifact(const std::string& id, const std::string& kind,
                                  const std::string& if_none_match) {
  auto s = Find(id);
  if (!s) return NotFound("unknown session " + id);
  std::lock_guard lock(s->mu);
  std::string etag = "r" + std::to_string(s->revision);
  Reply reply{200, "image/png", "", ""};
  const bool from_removal =
      kind == "fusion" || kind == "sparse" || kind == "dense" || kind == "result";
  if (from_removal) {
    if (!s->latest) return NotFound(kind + " is not available before removal");
    etag += "-" + std::to_string(std::hash<std::string>{}(s->latest_key) & 0xffffffffu);
  } else if (kind == "mask") {
    if (!s->mask) return NotFound("mask is not available before detection");
  } else if (kind != "original") {
    return NotFound("unknown artifact kind " + kind);
  }
  reply.etag = Quote(etag);
  if (!if_none_match.empty() && if_none_match == reply.etag) {
    reply.status = 304;
    reply.content_type.clear();
    return reply;
  }
  if (kind == "original") {
    reply.body = Bytes2String(EncodePng(s->image));
  } else if (kind == "mask") {
    reply.body = Bytes2String(MaskToPngBytes(*s->mask));
  } else if (kind == "fusion") {
    reply.body = Bytes2String(EncodePng(s->latest->fusion));
  } else if (kind == "sparse") {
    RasterImage img = s->latest->sparse.values;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      if (!s->latest->sparse.known.at(i)) {
        for (int c = 0; c < img.channels(); ++c) img.at(i, c) = 0.0;
      }
    }
    reply.body = Bytes2String(EncodePng16(img));
  } else if (kind == "dense") {
    reply.body = Bytes2String(EncodePng16(s->latest->dense));
  } else {
    reply.body = s->latest->result_png;
  }
  return reply;
}

Reply SessionService::DeleteSession(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return NotFound("unknown session " + id);
  lru_.erase(it->second.second);
  sessions_.erase(it);
  return {204, "", "", ""};
}

void MountRoutes(httplib::Server& server, SessionService& service) {
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    if (!r.etag.empty()) res.set_header("ETag", r.etag);
    if (!r.body.empty() || !r.content_type.empty()) res.set_content(r.body, r.content_type);
  };
  server.set_payload_max_length(kMaxUploadBytes + (1u << 20));
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr) {
    res.status = 500;
    res.set_content(json{{"error", "internal"}, {"message", "internal error"}}.dump(),
                    "application/json");
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 413 ? "payload-too-large"
                             : res.status == 404 ? "not-found"
                                                 : "http-" + std::to_string(res.status);
    res.set_content(json{{"error", code}, {"message", httplib::status_message(res.status)}}.dump(),
                    "application/json");
  });

  server.Post("/sessions", [&service, send](const httplib::Request& req, httplib::Response& res) {
    std::string bytes;
    if (req.is_multipart_form_data()) {
      if (req.has_file("image")) {
        bytes = req.get_file_value("image").content;
      } else if (!req.files.empty()) {
        bytes = req.files.begin()->second.content;
      }
    } else {
      bytes = req.body;
    }
    if (bytes.empty()) {
      send(res, Failure(400, "invalid-image", "expected an image upload"));
      return;
    }
    send(res, service.CreateSession(bytes));
  });
  server.Post(R"(/sessions/([^/]+)/strokes)",
              [&service, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.AddStrokes(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/strokes)",
             [&service, send](const httplib::Request& req, httplib::Response& res) {
               send(res, service.GetStrokes(req.matches[1]));
             });
  server.Post(R"(/sessions/([^/]+)/removal)",
              [&service, send](const httplib::Request& req, httplib::Response& res) {
                send(res, service.RunRemoval(req.matches[1], req.body));
              });
  server.Get(R"(/sessions/([^/]+)/artifacts/([^/]+))",
             [&service, send](const httplib::Request& req, httplib::Response& res) {
               send(res, service.GetArtifact(req.matches[1], req.matches[2],
                                             req.get_header_value("If-None-Match")));
             });
  server.Delete(R"(/sessions/([^/]+))",
                [&service, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, service.DeleteSession(req.matches[1]));
                });
}

}  // namespace umbra
