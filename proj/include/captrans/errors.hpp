/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace captrans {

// Exit codes used by the command line tool. Library code throws the matching
// exception type; the CLI maps it back to a code. Usage errors count as
// config errors.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kData = 3,
  kTrialFailures = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::kConfig; }
};

// Bad hyperparameters, bad ranges, inconsistent experiment setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed input files, empty corpora, unresolved image ids.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace captrans
