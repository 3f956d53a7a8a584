// Copyright 2026 The glovelearn Authors
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

// Shared helpers for the plain-text file formats.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace glovelearn {

/// Shortest-safe "%.17g" rendering; parsing it back yields the same double.
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep);
std::vector<std::string_view> split_whitespace(std::string_view line);

/// Throws ParseError naming `what` when the token is not a complete finite number.
double parse_double(std::string_view token, std::string_view what);
long long parse_integer(std::string_view token, std::string_view what);

/// Reads the next line, stripping a trailing '\r'. Returns false at EOF.
bool next_line(std::istream& in, std::string& line);

/// Reads the first line and throws ParseError unless it equals `tag`.
void expect_header(std::istream& in, std::string_view tag);

}  // namespace glovelearn
