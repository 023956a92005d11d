// Copyright 2026 The sgl Authors
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

namespace sgl {

/** Requested size exceeds a documented memory or enumeration budget. */
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** An iterative solver did not meet its tolerance within the iteration cap. */
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Invalid parameters or malformed input. */
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sgl
