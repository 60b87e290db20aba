// Copyright 2026 The sslab Authors
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


#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "sslab/config.hpp"
#include "sslab/csv.hpp"
#include "sslab/harness.hpp"
#include "synthetic_image.hpp"

namespace sslab::test_util {

// A fresh scratch directory per test.
inline std::filesystem::path ScratchDir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = std::filesystem::temp_directory_path() / "sslab_tests" /
             (std::string(info->test_suite_name()) + "." + info->name());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct CommandRun {
  int code = 0;
  std::string text;
  CsvTable table;
};

using Command = int (*)(const Config&, std::ostream&);

inline CommandRun RunCommand(Command cmd, const std::vector<std::pair<std::string, std::string>>& settings) {
  Config cfg = harness::DefaultConfig();
  for (const auto& [k, v] : settings) cfg.Set(k, v);
  std::ostringstream out;
  CommandRun run;
  run.code = cmd(cfg, out);
  run.text = out.str();
  // Only success and oracle failure write a full table.
  if (run.code == 0 || run.code == 1) {
    std::istringstream in(run.text);
    run.table = ReadCsv(in);
  }
  return run;
}

}  // namespace sslab::test_util
