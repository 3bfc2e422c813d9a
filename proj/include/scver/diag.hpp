#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scver {

struct SourceLoc {
  int line = 0;  // 1-based; 0 means "no position"
  int column = 0;

  bool valid() const { return line > 0; }
  std::string str() const {
    return valid() ? std::to_string(line) + ":" + std::to_string(column) : std::string("?");
  }
};

// Error taxonomy maps onto CLI exit codes:
//   Usage/Parse/Type -> 3,  Bound/Resource -> 2,  Infra -> 4.
enum class ErrorKind {
  Parse,      // lexical or syntax error
  Semantic,   // elaboration / property resolution / type error
  Usage,      // bad CLI arguments or malformed auxiliary files
  Bound,      // horizon exceeded (max_time / max_delta)
  Resource,   // state cap, run-step cap, cancellation
  Infra,      // missing external tool, unreadable file, subprocess failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, SourceLoc loc = {})
      : std::runtime_error(loc.valid() ? loc.str() + ": " + message : message),
        kind_(kind),
        loc_(loc) {}

  ErrorKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  ErrorKind kind_;
  SourceLoc loc_;
};

[[noreturn]] inline void fail_parse(const std::string& msg, SourceLoc loc) {
  throw Error(ErrorKind::Parse, msg, loc);
}
[[noreturn]] inline void fail_semantic(const std::string& msg, SourceLoc loc = {}) {
  throw Error(ErrorKind::Semantic, msg, loc);
}

}  // namespace scver
