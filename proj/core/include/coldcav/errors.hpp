#pragma once

#include <stdexcept>
#include <string>

namespace coldcav {

// Runtime numerical failures (integration breakdown, root finding that does
// not converge, fits on degenerate data). Argument/contract violations use
// std::invalid_argument. The CLI maps invalid_argument -> exit 1 and
// numerical_error -> exit 2.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coldcav
