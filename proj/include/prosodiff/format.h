// Copyright (c) 2026 The prosodiff Authors
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

#ifndef PROSODIFF_FORMAT_H_
#define PROSODIFF_FORMAT_H_

#include <string>
#include <string_view>
#include <vector>

namespace prosodiff {

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);
double ParseDouble(std::string_view text);

std::vector<std::string> SplitCsvLine(std::string_view line);

// Whole-file helpers; throw std::runtime_error on I/O failure.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace prosodiff

#endif  // PROSODIFF_FORMAT_H_
