#include "polylab/schema.hpp"

#include <fstream>
#include <stdexcept>

namespace polylab {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  throw std::domain_error("schema: unsupported type '" + t + "'");
}

const json& resolve(const json& root, const std::string& ref) {
  const std::string prefix = "#/definitions/";
  if (ref.rfind(prefix, 0) != 0) throw std::domain_error("schema: unsupported $ref '" + ref + "'");
  return root.at("definitions").at(ref.substr(prefix.size()));
}

void check(const json& v, const json& s, const json& root, const std::string& at, std::vector<std::string>& out) {
  if (s.is_boolean()) {
    if (!s.get<bool>()) out.push_back(at + ": not allowed");
    return;
  }
  if (s.contains("$ref")) {
    check(v, resolve(root, s.at("$ref").get<std::string>()), root, at, out);
    return;
  }
  if (s.contains("type")) {
    const json& t = s.at("type");
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(v, t.get<std::string>());
    } else {
      for (const auto& each : t) ok = ok || has_type(v, each.get<std::string>());
    }
    if (!ok) {
      out.push_back(at + ": expected type " + t.dump());
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s.at("enum")) found = found || e == v;
    if (!found) out.push_back(at + ": value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (s.contains("minimum") && x < s.at("minimum").get<double>()) out.push_back(at + ": below minimum");
    if (s.contains("maximum") && x > s.at("maximum").get<double>()) out.push_back(at + ": above maximum");
    if (s.contains("exclusiveMinimum") && x <= s.at("exclusiveMinimum").get<double>())
      out.push_back(at + ": not above exclusiveMinimum");
    if (s.contains("exclusiveMaximum") && x >= s.at("exclusiveMaximum").get<double>())
      out.push_back(at + ": not below exclusiveMaximum");
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& key : s.at("required"))
        if (!v.contains(key.get<std::string>())) out.push_back(at + ": missing '" + key.get<std::string>() + "'");
    }
    const json empty = json::object();
    const json& props = s.contains("properties") ? s.at("properties") : empty;
    for (const auto& [key, value] : v.items()) {
      const std::string where = at + "/" + key;
      if (props.contains(key)) {
        check(value, props.at(key), root, where, out);
      } else if (s.contains("additionalProperties")) {
        check(value, s.at("additionalProperties"), root, where, out);
      }
    }
  }
  if (v.is_array() && s.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s.at("items"), root, at + "/" + std::to_string(i), out);
  }
  if (s.contains("oneOf")) {
    std::size_t matched = 0;
    for (const auto& branch : s.at("oneOf")) {
      std::vector<std::string> sub;
      check(v, branch, root, at, sub);
      matched += sub.empty();
    }
    if (matched != 1) out.push_back(at + ": matches " + std::to_string(matched) + " oneOf branches");
  }
}

}  // namespace

std::vector<std::string> validate_schema(const nlohmann::json& doc, const nlohmann::json& schema) {
  std::vector<std::string> out;
  check(doc, schema, schema, "", out);
  return out;
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw std::domain_error(path.string() + ": " + ex.what());
  }
}

}  // namespace polylab
