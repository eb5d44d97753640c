// Copyright 2026 The FloodDepth Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flooddepth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate box, non-positive scale or any other geometric precondition.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// No stop-sign detection available (possibly after confidence filtering).
class NoSignError : public Error {
 public:
  using Error::Error;
};

class NoPoleError : public Error {
 public:
  using Error::Error;
};

/// A photo was used in the wrong flood phase (e.g. a post-flood baseline).
class PhaseError : public Error {
 public:
  using Error::Error;
};

/// Latitude/longitude outside [-90, 90] x [-180, 180].
class CoordError : public Error {
 public:
  using Error::Error;
};

class NoBaselineError : public Error {
 public:
  using Error::Error;
};

/// Bad argument to an evaluation or augmentation routine (empty input etc).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or unparsable config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed record in an input file. `line()` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace flooddepth
