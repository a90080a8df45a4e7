#pragma once

#include <stdexcept>
#include <string>

namespace deltaforge {

/// Raised on precondition violations and malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deltaforge
