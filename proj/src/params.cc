#include "umbra/params.h"

#include <cmath>

#include <json.hpp>

#include "umbra/error.h"
#include "umbra/image_io.h"

namespace umbra {

void ParamVector::Validate() const {
  const bool ok = h1 >= 3 && h2 >= 3 && std::isfinite(h3) && h3 > 0.0 &&
                  std::isfinite(h4) && h4 > 0.0 && std::isfinite(h5) &&
                  h5 > 1.0 && std::isfinite(h6) && h6 > 0.0;
  if (!ok) {
    throw Error(ErrorCode::kInvalidParameter,
                "parameters out of range: need h1,h2 >= 3; h3,h4,h6 > 0; h5 > 1");
  }
}

ParamVector ParseParams(const std::string& json_text) {
  ParamVector p;
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (!j.is_object()) {
      throw Error(ErrorCode::kInvalidParameter, "parameters must be a JSON object");
    }
    auto read_int = [&](const char* key, int& out) {
      if (!j.contains(key)) return;
      if (!j[key].is_number_integer()) {
        throw Error(ErrorCode::kInvalidParameter,
                    std::string("parameter ") + key + " must be an integer");
      }
      out = j[key].get<int>();
    };
    auto read_real = [&](const char* key, double& out) {
      if (!j.contains(key)) return;
      if (!j[key].is_number()) {
        throw Error(ErrorCode::kInvalidParameter,
                    std::string("parameter ") + key + " must be a number");
      }
      out = j[key].get<double>();
    };
    read_int("h1", p.h1);
    read_int("h2", p.h2);
    read_real("h3", p.h3);
    read_real("h4", p.h4);
    read_real("h5", p.h5);
    read_real("h6", p.h6);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidParameter, std::string("parameters: ") + e.what());
  }
  p.Validate();
  return p;
}

std::string ParamsToJson(const ParamVector& p) {
  nlohmann::ordered_json j;
  j["h1"] = p.h1;
  j["h2"] = p.h2;
  j["h3"] = p.h3;
  j["h4"] = p.h4;
  j["h5"] = p.h5;
  j["h6"] = p.h6;
  return j.dump();
}

ParamVector LoadParams(const std::string& path) {
  const Bytes raw = ReadFileBytes(path);
  return ParseParams(std::string(raw.begin(), raw.end()));
}

void SaveParams(const ParamVector& p, const std::string& path) {
  const std::string text = ParamsToJson(p) + "\n";
  WriteFileBytes(path, Bytes(text.begin(), text.end()));
}

}  // namespace umbra
