#include "support/minischema.hpp"

namespace scver::testing {

namespace {

bool type_matches(const std::string& type, const Json& v) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

void check(const Json& schema, const Json& v, const std::string& path,
           std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(t.get<std::string>(), v);
    } else {
      for (const auto& alt : t) ok = ok || type_matches(alt.get<std::string>(), v);
    }
    if (!ok) {
      out.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema["enum"]) ok = ok || alt == v;
    if (!ok) out.push_back(path + ": value " + v.dump() + " not in enum");
  }
  if (schema.contains("minimum") && v.is_number()) {
    if (v.get<double>() < schema["minimum"].get<double>()) {
      out.push_back(path + ": below minimum");
    }
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!v.contains(key.get<std::string>())) {
          out.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
        }
      }
    }
    const Json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    bool allow_extra = true;
    if (schema.contains("additionalProperties") && schema["additionalProperties"].is_boolean()) {
      allow_extra = schema["additionalProperties"].get<bool>();
    }
    const Json* extra_schema =
        schema.contains("additionalProperties") && schema["additionalProperties"].is_object()
            ? &schema["additionalProperties"]
            : nullptr;
    for (const auto& [key, val] : v.items()) {
      if (props && props->contains(key)) {
        check((*props)[key], val, path + "/" + key, out);
      } else if (extra_schema) {
        check(*extra_schema, val, path + "/" + key, out);
      } else if (!allow_extra) {
        out.push_back(path + ": unexpected key '" + key + "'");
      }
    }
  }
  if (v.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      check(schema["items"], v[i], path + "[" + std::to_string(i) + "]", out);
    }
  }
}

}  // namespace

std::vector<std::string> validate_against_schema(const Json& schema, const Json& instance) {
  std::vector<std::string> out;
  check(schema, instance, "$", out);
  return out;
}

Json load_schema(const std::string& name) {
  return parse_json_file(std::string(SCVER_SCHEMA_DIR) + "/" + name);
}

}  // namespace scver::testing
