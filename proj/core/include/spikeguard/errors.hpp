// Copyright 2026 The spikeguard Authors
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

namespace spikeguard {

/// Base of every exception thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message) : Error("dimension", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error("input", message) {}
};

/// Raised when the training loss becomes non-finite.
class TrainingError : public Error {
 public:
  TrainingError(std::size_t epoch, const std::string& message)
      : Error("training", message), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class CalibrationError : public Error {
 public:
  explicit CalibrationError(const std::string& message) : Error("calibration", message) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message) : Error("schema", message) {}
};

/// Bad cell content; `row()` is the 0-based data row (header excluded).
class IngestionError : public Error {
 public:
  IngestionError(std::size_t row, const std::string& message)
      : Error("ingestion", message), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SplitError : public Error {
 public:
  explicit SplitError(const std::string& message) : Error("split", message) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& message) : Error("generation", message) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& message) : Error("integrity", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace spikeguard
