#ifndef UMBRA_PARAMS_H_
#define UMBRA_PARAMS_H_

#include <string>

namespace umbra {

// The six pipeline tunables. Defaults are the learned optimum
// (14, 10, 0.1124, 0.0333, 8.5195, 0.2228).
struct ParamVector {
  int h1 = 14;         // detection smoothing kernel
  int h2 = 10;         // fusion median window
  double h3 = 0.1124;  // DBSCAN radius
  double h4 = 0.0333;  // mean-shift bandwidth
  double h5 = 8.5195;  // sampling-line gradient ratio
  double h6 = 0.2228;  // bilateral range sigma

  // Throws kInvalidParameter unless h1, h2 >= 3, h3, h4, h6 > 0, h5 > 1,
  // all finite.
  void Validate() const;
  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// {"h1":14,"h2":10,"h3":0.1124,"h4":0.0333,"h5":8.5195,"h6":0.2228}.
// Missing keys keep their defaults; the result is validated.
ParamVector ParseParams(const std::string& json_text);
std::string ParamsToJson(const ParamVector& p);
ParamVector LoadParams(const std::string& path);
void SaveParams(const ParamVector& p, const std::string& path);

}  // namespace umbra

#endif  // UMBRA_PARAMS_H_
