// Copyright 2026 The qcurv Authors
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


#ifndef QCURV_TOOLS_CLI_HPP
#define QCURV_TOOLS_CLI_HPP

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace qcurv::cli {

inline constexpr const char* kVersion = "0.1.0";

// Schema problem located by a JSON pointer.
struct SpecError : std::runtime_error {
  std::string pointer;
  SpecError(std::string ptr, const std::string& msg) : std::runtime_error(msg), pointer(std::move(ptr)) {}
};

// Certificate outcome for the exit code: false means an inequality failed beyond tolerance.
struct TaskResult {
  nlohmann::json report;
  std::string csv;  // empty when the task has no table
  bool certified = true;
};

struct TaskOptions {
  double tol = 1e-8;
  unsigned long long seed = 0;
  int steps = 6;
};

TaskResult run_task(const std::string& command, const nlohmann::json& spec, const TaskOptions& opt);

int main_entry(int argc, char** argv);

}  // namespace qcurv::cli

#endif  // QCURV_TOOLS_CLI_HPP
