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

#ifndef ANOVADISTILL_EXTERNAL_PREDICTOR_H_
#define ANOVADISTILL_EXTERNAL_PREDICTOR_H_

#include <sys/types.h>

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "anovadistill/predictor.h"

namespace anovadistill {

inline constexpr char kBridgeProtocol[] = "meta-anova-predictor";
inline constexpr int kBridgeVersion = 1;

struct ExternalOptions {
  // Applies to the handshake and to every request.
  double timeout_seconds = 60.0;
};

// A predictor served by a child process speaking the line-delimited JSON
// bridge protocol over its stdin/stdout:
//   handshake  {"protocol":"meta-anova-predictor","version":1,"p":<int>}
//   request    {"id":<uint64>,"x":[[...],...]}
//   response   {"id":<uint64>,"y":[...]}  or  {"id":<uint64>,"error":"..."}
// Requests are serialized; concurrent callers queue on a mutex. After any
// transport failure the predictor stays broken and every later call throws.
class ExternalPredictor : public Predictor {
 public:
  static std::unique_ptr<ExternalPredictor> Spawn(
      const std::vector<std::string>& argv, int p,
      const ExternalOptions& options = {});

  // Closes the child's stdin and reaps it, killing it after a grace period.
  ~ExternalPredictor() override;

  pid_t pid() const { return pid_; }
  const std::vector<std::string>& command() const { return argv_; }

  // Builds the exact request line (without newline).
  static std::string EncodeRequest(uint64_t id, const RowMatrix& points);

 protected:
  Eigen::VectorXd DoEvaluate(const RowMatrix& points) override;

 private:
  ExternalPredictor(std::vector<std::string> argv, int p,
                    const ExternalOptions& options);

  void Start();
  void Shutdown();
  void WriteAll(const std::string& data);
  std::string ReadLine();
  [[noreturn]] void Fail(const std::string& message);

  std::vector<std::string> argv_;
  ExternalOptions options_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  uint64_t next_id_ = 1;
  bool broken_ = false;
  std::mutex mutex_;
};

// Splits a command line on whitespace; double quotes group words.
std::vector<std::string> SplitCommand(const std::string& command);

}  // namespace anovadistill

#endif  // ANOVADISTILL_EXTERNAL_PREDICTOR_H_
