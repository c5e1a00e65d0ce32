// Copyright 2026 The Authors.
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

#include <cstdint>
#include <string>
#include <vector>

namespace fairrec {

std::string read_file(const std::string& path);  // throws with path on failure
void write_file(const std::string& path, const std::string& content);

// Lines split on '\n'; a trailing empty line is dropped; '\r' is stripped.
std::vector<std::string> read_lines(const std::string& path);

std::vector<std::string> split(const std::string& line, char sep);
// Split on a multi-character separator, e.g. "::" for the ML-1M files.
std::vector<std::string> split(const std::string& line, const std::string& sep);

// Strict numeric parsing: the whole field must convert.
double parse_double(const std::string& s);   // throws std::invalid_argument
std::int64_t parse_int(const std::string& s);

// FNV-1a 64-bit over file bytes, hex encoded; used in manifests.
std::string file_hash(const std::string& path);

}  // namespace fairrec
