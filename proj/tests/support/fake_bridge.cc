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

// Stand-in child process for the external predictor tests.
//   fake_bridge <mode> <p> [arg]
// Modes: echo, constant, wrong-p, die-after <n>, error-once, f1, transcript <file>,
// bad-handshake, hang, wrong-id, null-output, short-output, exit-early.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "anovadistill/analytic.h"

using json = nlohmann::json;

namespace {

void Send(const json& doc) { std::cout << doc.dump() << "\n" << std::flush; }

void Handshake(int p) {
  Send({{"protocol", "meta-anova-predictor"}, {"version", 1}, {"p", p}});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: fake_bridge <mode> <p> [arg]\n";
    return 2;
  }
  const std::string mode = argv[1];
  const int p = std::atoi(argv[2]);
  const std::string arg = argc > 3 ? argv[3] : "";

  if (mode == "bad-handshake") {
    std::cout << "hello there\n" << std::flush;
    return 0;
  }
  if (mode == "exit-early") return 0;
  if (mode == "wrong-p") {
    Handshake(std::atoi(arg.c_str()));
  } else {
    Handshake(p);
  }

  std::ofstream transcript;
  if (mode == "transcript") transcript.open(arg, std::ios::binary);
  auto f1 = anovadistill::AnalyticPredictor::Make("F1");
  int served = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (transcript.is_open()) transcript << line << "\n" << std::flush;
    const json req = json::parse(line);
    const uint64_t id = req["id"].get<uint64_t>();
    const auto& x = req["x"];
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::seconds(30));
      return 0;
    }
    if (mode == "die-after" && served >= std::atoi(arg.c_str())) {
      return 1;
    }
    ++served;
    if (mode == "error-once" && served == 1) {
      Send({{"id", id}, {"error", "boom"}});
      continue;
    }
    json y = json::array();
    for (const auto& row : x) {
      if (mode == "constant") {
        y.push_back(3.0);
      } else if (mode == "f1") {
        const std::vector<double> unit = row.get<std::vector<double>>();
        y.push_back(f1->EvaluateRaw(f1->ToBox(unit)));
      } else {
        y.push_back(row[0]);
      }
    }
    if (mode == "null-output") y[0] = nullptr;
    if (mode == "short-output") y.erase(y.size() - 1);
    Send({{"id", mode == "wrong-id" ? id + 1 : id}, {"y", y}});
  }
  return 0;
}
