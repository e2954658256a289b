// Copyright 2026 The tokscope Authors.
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

// The tokscope command line: encode, metrics, export-curve, correlate,
// predict, rank and gen-zipf.

#ifndef TOKSCOPE_TOOLS_CLI_H_
#define TOKSCOPE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace tokscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // a module reported an error
inline constexpr int kExitUsage = 2;    // bad command line

// `args` excludes the program name. Reports go to `out` unless the command
// is given --out; diagnostics and warnings go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace tokscope::cli

#endif  // TOKSCOPE_TOOLS_CLI_H_
