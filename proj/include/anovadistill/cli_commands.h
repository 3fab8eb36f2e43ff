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

#ifndef ANOVADISTILL_CLI_COMMANDS_H_
#define ANOVADISTILL_CLI_COMMANDS_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace anovadistill {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 2,
  kExitPredictor = 3,
  kExitNumerical = 4,
};

// Runs the command line `args` (without the program name). Returns the
// process exit code; reports go to the output directory, progress to `out`
// and diagnostics to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace anovadistill

#endif  // ANOVADISTILL_CLI_COMMANDS_H_
