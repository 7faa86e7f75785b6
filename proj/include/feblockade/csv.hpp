// Copyright 2026 The feblockade Authors
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
#include <iosfwd>
#include <string>
#include <vector>

namespace feb::csv {

/// Shortest text with 17 significant digits, '.' separator, locale-free.
std::string format(double x);

/// One comma-separated row terminated by '\n'.
void write_row(std::ostream& os, const std::vector<std::string>& cells);

/// Writes `content` in binary mode so line endings stay LF.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace feb::csv
