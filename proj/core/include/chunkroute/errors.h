// Copyright 2026 The chunkroute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHUNKROUTE_ERRORS_H_
#define CHUNKROUTE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace chunkroute {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, profile or command-line value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Data that violates a documented invariant (spans, annotations, plans).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Empty input where at least one element is required.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Shape mismatch or non-finite value inside the numerics layer.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// A PII unit that does not fit inside a single chunk.
class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Lookup of a missing key (precomputed embeddings, checkpoints).
class LookupError : public Error {
 public:
  using Error::Error;
};

// Input beyond a documented size bound (e.g. brute-force enumeration).
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace chunkroute

#endif  // CHUNKROUTE_ERRORS_H_
