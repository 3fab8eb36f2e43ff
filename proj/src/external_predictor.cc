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

#include "anovadistill/external_predictor.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "json.hpp"

#include "anovadistill/error.h"

extern char** environ;

namespace anovadistill {
namespace {

using json = nlohmann::json;

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

std::vector<std::string> SplitCommand(const std::string& command) {
  std::vector<std::string> words;
  std::string word;
  bool quoted = false, have = false;
  for (char c : command) {
    if (c == '"') {
      quoted = !quoted;
      have = true;
    } else if (!quoted && (c == ' ' || c == '\t')) {
      if (have) words.push_back(word);
      word.clear();
      have = false;
    } else {
      word += c;
      have = true;
    }
  }
  if (have) words.push_back(word);
  return words;
}

std::unique_ptr<ExternalPredictor> ExternalPredictor::Spawn(
    const std::vector<std::string>& argv, int p,
    const ExternalOptions& options) {
  if (argv.empty()) throw InvalidArgumentError("empty predictor command");
  if (!(options.timeout_seconds > 0)) {
    throw InvalidArgumentError("predictor timeout must be positive");
  }
  std::unique_ptr<ExternalPredictor> pred(
      new ExternalPredictor(argv, p, options));
  pred->Start();
  return pred;
}

ExternalPredictor::ExternalPredictor(std::vector<std::string> argv, int p,
                                     const ExternalOptions& options)
    : Predictor(PredictorKind::kExternal, p, "external:" + argv.front()),
      argv_(std::move(argv)),
      options_(options) {}

ExternalPredictor::~ExternalPredictor() { Shutdown(); }

void ExternalPredictor::Start() {
  IgnoreSigpipe();
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw PredictorError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw PredictorError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);
  const int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr,
                                args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (rc != 0) {
    pid_ = -1;
    Shutdown();
    throw PredictorError("failed to spawn predictor \"" + argv_.front() +
                         "\": " + std::strerror(rc));
  }

  std::string line;
  try {
    line = ReadLine();
  } catch (const PredictorError& e) {
    Shutdown();
    throw PredictorError(std::string("handshake failed: ") + e.what());
  }
  json hello;
  try {
    hello = json::parse(line);
  } catch (const json::exception&) {
    Shutdown();
    throw PredictorError("handshake failed: malformed line \"" + line + "\"");
  }
  const bool ok = hello.is_object() && hello.contains("protocol") &&
                  hello["protocol"] == kBridgeProtocol &&
                  hello.contains("version") &&
                  hello["version"] == kBridgeVersion && hello.contains("p") &&
                  hello["p"].is_number_integer();
  if (!ok) {
    Shutdown();
    throw PredictorError("handshake failed: unexpected line \"" + line + "\"");
  }
  const int advertised = hello["p"].get<int>();
  if (advertised != dim()) {
    Shutdown();
    throw PredictorError("dimension mismatch: predictor advertises p=" +
                         std::to_string(advertised) + ", data has p=" +
                         std::to_string(dim()));
  }
}

void ExternalPredictor::Shutdown() {
  if (to_child_ >= 0) {
    ::close(to_child_);
    to_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    bool reaped = false;
    for (int i = 0; i < 200 && !reaped; ++i) {
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || r < 0) {
        reaped = true;
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
    }
    if (!reaped) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
}

void ExternalPredictor::Fail(const std::string& message) {
  broken_ = true;
  throw PredictorError(message);
}

void ExternalPredictor::WriteAll(const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t w = ::write(to_child_, data.data() + done, data.size() - done);
    if (w < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE) Fail("predictor terminated");
      Fail(std::string("write to predictor failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(w);
  }
}

std::string ExternalPredictor::ReadLine() {
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(options_.timeout_seconds));
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) Fail("predictor timed out");
    pollfd pfd{from_child_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (pr < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("poll failed: ") + std::strerror(errno));
    }
    if (pr == 0) Fail("predictor timed out");
    char chunk[65536];
    const ssize_t r = ::read(from_child_, chunk, sizeof(chunk));
    if (r < 0) {
      if (errno == EINTR) continue;
      Fail(std::string("read from predictor failed: ") + std::strerror(errno));
    }
    if (r == 0) Fail("predictor terminated");
    buffer_.append(chunk, static_cast<std::size_t>(r));
  }
}

std::string ExternalPredictor::EncodeRequest(uint64_t id,
                                             const RowMatrix& points) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < points.cols(); ++j) row.push_back(points(i, j));
    rows.push_back(std::move(row));
  }
  json request = json::object();
  request["id"] = id;
  request["x"] = std::move(rows);
  return request.dump();
}

Eigen::VectorXd ExternalPredictor::DoEvaluate(const RowMatrix& points) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (broken_ || to_child_ < 0) {
    throw PredictorError("predictor terminated");
  }
  const uint64_t id = next_id_++;
  WriteAll(EncodeRequest(id, points) + "\n");
  const std::string line = ReadLine();
  json reply;
  try {
    reply = json::parse(line);
  } catch (const json::exception&) {
    Fail("protocol violation: malformed response \"" + line.substr(0, 200) +
         "\"");
  }
  if (!reply.is_object() || !reply.contains("id") ||
      !reply["id"].is_number_unsigned() || reply["id"].get<uint64_t>() != id) {
    Fail("protocol violation: response id does not match request " +
         std::to_string(id));
  }
  if (reply.contains("error")) {
    const auto& err = reply["error"];
    throw PredictorError("predictor error: " +
                         (err.is_string() ? err.get<std::string>() : err.dump()));
  }
  if (!reply.contains("y") || !reply["y"].is_array() ||
      reply["y"].size() != static_cast<std::size_t>(points.rows())) {
    Fail("protocol violation: response must carry " +
         std::to_string(points.rows()) + " outputs");
  }
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto& v = reply["y"][static_cast<std::size_t>(i)];
    if (!v.is_number()) {
      Fail("protocol violation: non-numeric output at row " +
           std::to_string(i));
    }
    out[i] = v.get<double>();
  }
  return out;
}

}  // namespace anovadistill
