//
// Copyright 2026 The LLQFP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <stdexcept>
#include <string>

namespace llqfp {

// Invalid constructor or function argument (bad noise parameters, odd ring
// degree, malformed budget).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (u outside [0,1],
// profile outside the action box, player index out of range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A modelling assumption the downstream results depend on does not hold,
// e.g. the game is not strongly monotone or inputs are not adjacent.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular or otherwise unsolvable linear algebra.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: edge lists, draw records, experiment configs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration (unknown key, bad value, conflicting keys).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace llqfp
