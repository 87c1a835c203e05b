#pragma once

#include <stdexcept>
#include <string>

namespace scorecf {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input documents (JSON, MusicXML, checkpoints).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally well-formed input that violates a domain constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failures during search or replay (no candidates, delta mismatch, ...).
class SearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace scorecf
