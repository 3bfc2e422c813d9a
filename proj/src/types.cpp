#include "scver/types.hpp"

namespace scver {

std::string ScalarType::str() const {
  switch (kind) {
    case Kind::Bool:
      return "bool";
    case Kind::Int:
      return "int[" + std::to_string(lo) + ".." + std::to_string(hi) + "]";
    case Kind::Enum: {
      std::string s = "enum {";
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) s += ", ";
        s += labels[i];
      }
      return s + "}";
    }
  }
  return "?";
}

std::string ScalarType::render(Value v) const {
  switch (kind) {
    case Kind::Bool:
      return v ? "true" : "false";
    case Kind::Int:
      return std::to_string(v);
    case Kind::Enum:
      if (v >= 0 && v < static_cast<std::int64_t>(labels.size())) return labels[v];
      return "<bad:" + std::to_string(v) + ">";
  }
  return "?";
}

}  // namespace scver
