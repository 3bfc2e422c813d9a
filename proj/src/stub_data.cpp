#include "scver/stub_data.hpp"

#include <sstream>

#include "scver/util.hpp"

namespace scver {

std::string alphabet_fingerprint(const std::string& module_name,
                                 const std::vector<std::string>& names,
                                 const std::vector<bool>& is_in,
                                 const std::vector<ScalarType>& types) {
  std::ostringstream os;
  os << "alphabet/v1|" << module_name;
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << "|" << (is_in[i] ? "in " : "out ") << names[i] << ":" << types[i].str();
  }
  return sha256_hex(os.str());
}

}  // namespace scver
