// Copyright 2026 The crymodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crymodal {

// Base of every error raised by the library. Callers that only care about
// "something went wrong with this input" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed container (truncated RIFF header, missing chunk, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed but outside what we decode (ADPCM, 8-bit, ...).
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

// Argument outside an operation's domain (empty interval, frame past end).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Signal carries no usable energy (all zeros, zero variance).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace crymodal
