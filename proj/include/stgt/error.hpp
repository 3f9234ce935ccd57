// Copyright 2026 The stgt Authors
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

#include <stdexcept>
#include <string>

namespace stgt {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry
class UndefinedGeometryError : public Error { public: using Error::Error; };
class EmptyMaskError : public Error { public: using Error::Error; };
class DimensionError : public Error { public: using Error::Error; };

// 4D layout
class DegenerateCloudError : public Error { public: using Error::Error; };
class InsufficientPointsError : public Error { public: using Error::Error; };
class EmptyCloudError : public Error { public: using Error::Error; };
class InvalidAnthropometryError : public Error { public: using Error::Error; };

// Grounding
class UndefinedCosineError : public Error { public: using Error::Error; };
class MissingDepthError : public Error { public: using Error::Error; };
class OutOfBoundsError : public Error { public: using Error::Error; };
class NoCandidatesError : public Error { public: using Error::Error; };
class ConfigurationError : public Error { public: using Error::Error; };

// Splitter
class SizeGuardError : public Error { public: using Error::Error; };

// Taxonomy
class MergeFailureError : public Error { public: using Error::Error; };

// File I/O. Message carries the offending file (and line for line-oriented
// formats) so batch loaders can point at the exact record.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& file, const std::string& detail)
      : Error(file + ": " + detail), file_(file) {}
  ValidationError(const std::string& file, long line, const std::string& detail)
      : Error(file + ":" + std::to_string(line) + ": " + detail), file_(file) {}
  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

class IoError : public Error { public: using Error::Error; };

}  // namespace stgt
