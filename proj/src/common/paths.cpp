// src/common/paths.cpp

// Copyright 2026 The medleysep Authors

// See the top-level LICENSE file for the full license text.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "medleysep/common/paths.h"

#include <cstdlib>

namespace medleysep {

std::filesystem::path resolve_data_path(const std::filesystem::path& path,
                                        const std::filesystem::path& base_dir) {
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv(kDataRootEnv); root != nullptr && *root != '\0')
    return std::filesystem::path(root) / path;
  return base_dir / path;
}

}  // namespace medleysep
