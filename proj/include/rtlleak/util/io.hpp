// Copyright 2026 The rtlleak Authors.
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

// File helpers shared by the dataset, cache and campaign layers.

#ifndef RTLLEAK_UTIL_IO_HPP
#define RTLLEAK_UTIL_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

namespace rtlleak {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Whole file as bytes. Throws IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file, then renames over the target. Parent
// directories are created.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);

}  // namespace rtlleak

#endif  // RTLLEAK_UTIL_IO_HPP
