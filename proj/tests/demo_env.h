// Copyright 2026 The DCO Authors.
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

#ifndef DCO_TESTS_DEMO_ENV_H_
#define DCO_TESTS_DEMO_ENV_H_

#include <filesystem>

#include "dco/engine.h"
#include "test_util.h"

namespace dco::testing {

// A private copy of demo/ so edits and block records stay out of the tree.
class DemoEnv {
 public:
  DemoEnv() {
    std::filesystem::copy(SourcePath("demo"), dir_.path(),
                          std::filesystem::copy_options::recursive);
  }

  std::filesystem::path directives() const { return dir_ / "editor.directives.json"; }
  std::filesystem::path mock_script() const { return dir_ / "editor.mock.json"; }
  std::filesystem::path blocks() const { return dir_ / "blocks.jsonl"; }
  std::filesystem::path sample() const { return dir_ / "sample.txt"; }
  const std::filesystem::path& path() const { return dir_.path(); }

  EngineConfig Config() const {
    EngineConfig config;
    config.directives_path = directives();
    config.backend = BackendKind::kMock;
    config.mock_script = mock_script();
    config.blocks_path = blocks();
    return config;
  }

 private:
  TempDir dir_;
};

}  // namespace dco::testing

#endif  // DCO_TESTS_DEMO_ENV_H_
