#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vfuzz/error.hpp"

namespace vfuzz::json_util {

using json = nlohmann::json;

// Parses `text`, turning library errors into ParseError carrying the byte offset.
inline json parse(std::string_view text, const std::string& source = "<input>") {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), source + ":byte " + std::to_string(e.byte));
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing", path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed", path);
}

// Rejects keys outside `allowed` and reports any missing `required` key.
inline void check_keys(const json& obj, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional, const std::string& where) {
  if (!obj.is_object()) throw SchemaError("expected object", where);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto k : required) known = known || k == it.key();
    for (auto k : optional) known = known || k == it.key();
    if (!known) throw SchemaError("unknown field '" + it.key() + "'", where);
  }
  for (auto k : required) {
    if (!obj.contains(std::string(k)))
      throw SchemaError("missing field '" + std::string(k) + "'", where);
  }
}

inline const json& field(const json& obj, std::string_view key, const std::string& where) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw SchemaError("missing field '" + std::string(key) + "'", where);
  return *it;
}

inline long long get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw SchemaError("expected integer", where);
  return v.get<long long>();
}

inline double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SchemaError("expected number", where);
  return v.get<double>();
}

inline std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw SchemaError("expected string", where);
  return v.get<std::string>();
}

inline const json& get_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError("expected array", where);
  return v;
}

}  // namespace vfuzz::json_util
