#pragma once

#include <stdexcept>
#include <string>

namespace trecom {

// Input could not be parsed (malformed JSON/CSV, wrong field types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input parsed but violates a structural invariant (dangling edge,
// disconnected graph, negative population, missing election column ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation could not be carried out on otherwise valid input.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trecom
