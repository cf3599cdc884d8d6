// Copyright 2026 The Hieracoustic Authors
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

#ifndef ASC_CLI_H_
#define ASC_CLI_H_

#include <string>
#include <vector>

namespace asc::cli {

/// Runs one `hieracoustic` invocation in-process. `args` excludes the
/// program name. Exit codes: 0 success, 1 usage or configuration error,
/// 2 data error, 3 internal invariant violation.
int run(const std::vector<std::string>& args);

}  // namespace asc::cli

#endif  // ASC_CLI_H_
