#include "umbra/strokes.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "umbra/image_io.h"

namespace umbra {
namespace {

using nlohmann::json;

double SegmentDistanceSquared(double px, double py, StrokePoint a,
                              StrokePoint b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - a.x) * vx + (py - a.y) * vy) / len2, 0.0, 1.0);
  }
  const double dx = px - (a.x + t * vx);
  const double dy = py - (a.y + t * vy);
  return dx * dx + dy * dy;
}

void RasterizeStroke(const Stroke& stroke, Mask& out) {
  const auto& pts = stroke.points;
  const double r = stroke.radius;
  const double r2 = r * r;
  const std::size_t segments = pts.size() == 1 ? 1 : pts.size() - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const StrokePoint a = pts[s];
    const StrokePoint b = pts.size() == 1 ? pts[s] : pts[s + 1];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    const int x1 = std::min(out.width() - 1,
                            static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    const int y1 = std::min(out.height() - 1,
                            static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (SegmentDistanceSquared(x, y, a, b) <= r2) out.set(x, y, true);
      }
    }
  }
}

}  // namespace

void StrokeSet::Append(const StrokeSet& delta) {
  strokes.insert(strokes.end(), delta.strokes.begin(), delta.strokes.end());
}

bool StrokeSet::HasLabel(StrokeLabel label) const {
  return std::any_of(strokes.begin(), strokes.end(), [&](const Stroke& s) {
    return s.label == label && !s.points.empty();
  });
}

StrokeSet ParseStrokes(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("stroke JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("strokes") ||
      !doc["strokes"].is_array()) {
    throw Error(ErrorCode::kInvalidInput, "stroke JSON needs a strokes array");
  }
  StrokeSet set;
  try {
    for (const json& item : doc["strokes"]) {
      Stroke stroke;
      const std::string label = item.at("label").get<std::string>();
      if (label == "shadow") {
        stroke.label = StrokeLabel::kShadow;
      } else if (label == "lit") {
        stroke.label = StrokeLabel::kLit;
      } else {
        throw Error(ErrorCode::kInvalidInput, "unknown stroke label: " + label);
      }
      stroke.radius = item.value("radius", 1.0);
      if (!(stroke.radius >= 1.0)) {
        throw Error(ErrorCode::kInvalidInput, "stroke radius must be >= 1");
      }
      for (const json& p : item.at("points")) {
        if (!p.is_array() || p.size() != 2) {
          throw Error(ErrorCode::kInvalidInput, "stroke point must be [x,y]");
        }
        stroke.points.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      set.strokes.push_back(std::move(stroke));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidInput,
                std::string("stroke JSON: ") + e.what());
  }
  return set;
}

std::string StrokesToJson(const StrokeSet& strokes) {
  json arr = json::array();
  for (const Stroke& s : strokes.strokes) {
    json points = json::array();
    for (const StrokePoint& p : s.points) points.push_back({p.x, p.y});
    arr.push_back({{"label", s.label == StrokeLabel::kShadow ? "shadow" : "lit"},
                   {"radius", s.radius},
                   {"points", points}});
  }
  return json{{"strokes", arr}}.dump();
}

StrokeSet LoadStrokes(const std::string& path) {
  const Bytes bytes = ReadFileBytes(path);
  return ParseStrokes(std::string(bytes.begin(), bytes.end()));
}

Mask RasterizeLabel(const StrokeSet& strokes, StrokeLabel label, int width,
                    int height) {
  Mask out(width, height);
  for (const Stroke& s : strokes.strokes) {
    if (s.label == label && !s.points.empty()) RasterizeStroke(s, out);
  }
  return out;
}

std::vector<std::size_t> StrokeConflicts(const StrokeSet& strokes, int width,
                                         int height) {
  const Mask shadow =
      RasterizeLabel(strokes, StrokeLabel::kShadow, width, height);
  const Mask lit = RasterizeLabel(strokes, StrokeLabel::kLit, width, height);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < shadow.pixel_count(); ++i) {
    if (shadow.at(i) && lit.at(i)) out.push_back(i);
  }
  return out;
}

void CheckStrokeBounds(const StrokeSet& strokes, int width, int height) {
  for (const Stroke& s : strokes.strokes) {
    for (const StrokePoint& p : s.points) {
      if (!(p.x >= 0 && p.y >= 0 && p.x <= width - 1 && p.y <= height - 1)) {
        throw Error(ErrorCode::kInvalidInput, "stroke point outside image");
      }
    }
  }
}

StrokePixels RasterizeStrokes(const StrokeSet& strokes, int width, int height) {
  CheckStrokeBounds(strokes, width, height);
  if (!strokes.HasLabel(StrokeLabel::kShadow) ||
      !strokes.HasLabel(StrokeLabel::kLit)) {
    throw Error(ErrorCode::kInsufficientStrokes,
                "insufficient strokes: both shadow and lit strokes are required");
  }
  StrokePixels px{RasterizeLabel(strokes, StrokeLabel::kShadow, width, height),
                  RasterizeLabel(strokes, StrokeLabel::kLit, width, height)};
  const std::size_t overlap = px.shadow.And(px.lit).Count();
  if (overlap > 0) {
    throw Error(ErrorCode::kConflictingStrokes,
                "shadow and lit strokes overlap on " +
                    std::to_string(overlap) + " pixels");
  }
  return px;
}

}  // namespace umbra
