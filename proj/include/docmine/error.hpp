#pragma once

#include <stdexcept>
#include <string>

namespace docmine {

// Bad input data or a model that cannot be used (missing file, corrupt
// bundle, degenerate training set). The CLI maps this to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace docmine
