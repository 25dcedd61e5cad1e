// Copyright 2026 The asreval Authors.
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

#include <stdexcept>
#include <string>

namespace asreval {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad invocation or configuration (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed: non-convergence, separation, undefined
// statistic (exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace asreval
