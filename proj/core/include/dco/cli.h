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

#ifndef DCO_CLI_H_
#define DCO_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dco {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `dco` tool. Subcommands: generate, invoke, edit, blocks,
// purge, eval, serve. Returns 0 on success, 1 on a domain failure (failed
// block, failed invocation, unknown directive), 2 on a usage error.
int CliDispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int CliDispatch(int argc, char** argv);

}  // namespace dco

#endif  // DCO_CLI_H_
