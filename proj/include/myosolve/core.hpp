#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace myo {

using index_t = std::int32_t;

/// Thrown when a direct factorization meets a pivot too small to use.
/// `where` is the elimination step (column) at which the breakdown occurred.
class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(const std::string& what, index_t where)
      : std::runtime_error(what), where_(where) {}
  index_t where() const { return where_; }

private:
  index_t where_;
};

/// Thrown by assembly when an element's geometric Jacobian is not positive.
class ElementInversionError : public std::runtime_error {
public:
  ElementInversionError(const std::string& what, index_t element)
      : std::runtime_error(what), element_(element) {}
  index_t element() const { return element_; }

private:
  index_t element_;
};

}  // namespace myo
