// Copyright 2026 The ABLR Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ablr::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2 };

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Same digest as 'git hash-object' for the given bytes.
std::string git_blob_sha1(const std::string& bytes);
std::string git_blob_sha1_file(const std::string& path);

}  // namespace ablr::cli
