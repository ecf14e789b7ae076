#ifndef UMBRA_STROKES_H_
#define UMBRA_STROKES_H_

#include <string>
#include <vector>

#include "umbra/image.h"

namespace umbra {

enum class StrokeLabel { kShadow, kLit };

struct StrokePoint {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

struct Stroke {
  StrokeLabel label = StrokeLabel::kShadow;
  double radius = 1.0;
  std::vector<StrokePoint> points;
  friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct StrokeSet {
  std::vector<Stroke> strokes;

  void Append(const StrokeSet& delta);
  bool HasLabel(StrokeLabel label) const;
  friend bool operator==(const StrokeSet&, const StrokeSet&) = default;
};

// JSON form: {"strokes":[{"label":"shadow","radius":6,"points":[[x,y],...]}]}
StrokeSet ParseStrokes(const std::string& json_text);
std::string StrokesToJson(const StrokeSet& strokes);
StrokeSet LoadStrokes(const std::string& path);

// Pixels covered by the strokes, split by label. Each stroke is a chain of
// disks of its radius swept along every polyline segment.
struct StrokePixels {
  Mask shadow;
  Mask lit;
};

// Throws kInvalidInput when a point lies outside [0, width-1] x [0, height-1].
void CheckStrokeBounds(const StrokeSet& strokes, int width, int height);

// Validates bounds and label presence; throws on overlap between labels.
StrokePixels RasterizeStrokes(const StrokeSet& strokes, int width, int height);

// Rasterizes without validation. Used to report conflicts.
Mask RasterizeLabel(const StrokeSet& strokes, StrokeLabel label, int width,
                    int height);

// Pixels claimed by both labels, row-major linear indices.
std::vector<std::size_t> StrokeConflicts(const StrokeSet& strokes, int width,
                                         int height);

}  // namespace umbra

#endif  // UMBRA_STROKES_H_
