#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "exset/calibration.hpp"
#include "exset/error.hpp"
#include "exset/excursion_model.hpp"

namespace exset::jsonio {

using nlohmann::json;

// NaN and infinities have no JSON literal; they travel as strings.
inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw DataError("json: expected a number, got " + j.dump());
}

inline json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline std::vector<double> nums(const json& j) {
  if (!j.is_array()) throw DataError("json: expected an array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(num(x));
  return v;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DataError(std::string("json: missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("json: field '") + key + "': " + e.what());
  }
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get<T>(j, key);
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("json: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
}

json to_json(const ModelParams& p);
ModelParams params_from(const json& j);
json to_json(const TrainConfig& c);
TrainConfig train_config_from(const json& j);
json to_json(const AdamState& s);
AdamState adam_from(const json& j);
std::string kind_name(ModelKind k);
ModelKind parse_kind(const std::string& s);

}  // namespace exset::jsonio
