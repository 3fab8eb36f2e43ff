/*
 * Copyright 2026 The anovadistill Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANOVADISTILL_ERROR_H_
#define ANOVADISTILL_ERROR_H_

#include <stdexcept>
#include <string>

namespace anovadistill {

// Bad arguments, malformed input files, inconsistent configuration.
class InvalidArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The black box failed: non-finite output, bridge protocol violation, child
// process exit or timeout.
class PredictorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Singular systems, non-finite losses and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace anovadistill

#endif  // ANOVADISTILL_ERROR_H_
