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

#include <cmath>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace qcurv::cli;
using nlohmann::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(QCURV_SPEC_DIR) + "/" + name);
  REQUIRE(in.good());
  return json::parse(in);
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("depolarizing curvature report") {
    const TaskResult t = run_task("curvature", load("depolarizing.json"), {});
    CHECK(std::abs(t.report.at("factor_upper").get<double>() - 5.0 / 6.0) <= 1e-12);
    CHECK(std::abs(t.report.at("factor_lower").get<double>() - 2.0 / 3.0) <= 1e-12);
    CHECK(t.report.at("version") == kVersion);
    CHECK(t.report.at("seed") == 0);
    CHECK(t.certified);
  }

  TEST_CASE("identical states are at distance zero") {
    const TaskResult t = run_task("wasserstein", load("pair.json"), {});
    CHECK(t.report.at("value").get<double>() == 0.0);
  }

  TEST_CASE("infinite transport is reported by status") {
    json spec = load("pair.json");
    spec["metric"]["seminorm"]["generators"] = {"Z"};
    spec["rho2"]["index"] = 1;
    const TaskResult t = run_task("wasserstein", spec, {});
    CHECK(t.report.at("status") == "infinite");
    CHECK(!t.report.contains("value"));
  }

  TEST_CASE("singlet coupling cost") {
    const TaskResult t = run_task("wasserstein", load("singlet.json"), {});
    CHECK(std::abs(t.report.at("value").get<double>() - 0.5) <= 1e-7);
  }

  TEST_CASE("bosonic mixing table") {
    TaskOptions opt;
    opt.steps = 6;
    const TaskResult t = run_task("mixing", load("bose.json"), opt);
    const auto rows = parse_csv(t.csv);
    REQUIRE(rows.size() == 6);
    for (size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i][2] >= rows[i][1]);
      if (i > 0) CHECK(rows[i][2] <= rows[i - 1][2]);
    }
    CHECK(t.certified);
  }

  TEST_CASE("Pauli mixing table") {
    TaskOptions opt;
    opt.steps = 8;
    const TaskResult t = run_task("mixing", load("pauli_mixing.json"), opt);
    const auto rows = parse_csv(t.csv);
    REQUIRE(rows.size() == 9);
    for (const auto& r : rows) CHECK(r[1] <= r[2] + 1e-6);
  }

  TEST_CASE("transport-entropy certificate") {
    const TaskResult t = run_task("certify-tc", load("site_replacements.json"), {});
    CHECK(t.certified);
    CHECK(t.report.at("rows").size() == 6);
  }

  TEST_CASE("schema errors carry a pointer") {
    try {
      run_task("curvature", load("bad_missing_p.json"), {});
      FAIL("expected a schema error");
    } catch (const SpecError& e) {
      CHECK(e.pointer == "/channel/p");
    }
    json spec = load("pauli_mixing.json");
    spec["channel"]["terms"][2]["string"] = "ZQ";
    try {
      run_task("gap", spec, {});
      FAIL("expected a schema error");
    } catch (const SpecError& e) {
      CHECK(e.pointer == "/channel/terms/2/string");
    }
  }

  TEST_CASE("reports are deterministic") {
    TaskOptions opt;
    opt.seed = 17;
    const json spec = load("pauli_mixing.json");
    CHECK(run_task("mixing", spec, opt).report.dump() == run_task("mixing", spec, opt).report.dump());
    opt.seed = 18;
    const json other = run_task("mixing", spec, opt).report;
    CHECK(other.at("seed") == 18);
  }
}
