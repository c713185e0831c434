#pragma once

#include <stdexcept>
#include <string>

namespace emtl {

// Invalid configuration or malformed input files. The CLI maps this to exit
// code 2; everything else that escapes is a runtime failure (exit code 1).
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace emtl
