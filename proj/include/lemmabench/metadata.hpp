#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lemmabench {

/// Ordered key/value pairs written at the top of every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

}  // namespace lemmabench
