#pragma once

#include <stdexcept>
#include <string>

namespace tc {

// Caller violated a documented precondition (bad prime, wrong character, ...).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Input outside the domain of a mathematical function (y = 0, a = b, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

// A case the library deliberately does not implement.
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tc
