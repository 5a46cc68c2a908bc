#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"

namespace camcond::io::detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + msg);
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

inline int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "integer out of range");
  return static_cast<int>(v);
}

inline bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

inline std::string string_of(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

/// Requires an array, of exactly `size` elements unless size is npos.
inline const Json& array_of(const Json& j, const std::string& path, std::size_t size = std::string::npos) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size != std::string::npos && j.size() != size) {
    fail(path, "expected " + std::to_string(size) + " elements, got " + std::to_string(j.size()));
  }
  return j;
}

void check_version(const Json& j, const std::string& path);

}  // namespace camcond::io::detail
