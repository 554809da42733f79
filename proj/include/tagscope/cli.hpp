// Copyright 2026 The Tagscope Authors. All Rights Reserved.
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

#pragma once

#include <iosfwd>

namespace tagscope {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the `tagscope` command. Returns the process exit code;
/// diagnostics go to `err`, progress and summary tables to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tagscope
