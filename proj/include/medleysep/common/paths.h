// include/medleysep/common/paths.h

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

#ifndef MEDLEYSEP_COMMON_PATHS_H_
#define MEDLEYSEP_COMMON_PATHS_H_

#include <filesystem>

namespace medleysep {

// Environment variable used as prefix for relative data paths.
inline constexpr const char* kDataRootEnv = "MEDLEYSEP_DATA_ROOT";

// Absolute paths are returned unchanged. Relative paths are joined to
// $MEDLEYSEP_DATA_ROOT when set, otherwise to base_dir.
std::filesystem::path resolve_data_path(const std::filesystem::path& path,
                                        const std::filesystem::path& base_dir);

}  // namespace medleysep

#endif  // MEDLEYSEP_COMMON_PATHS_H_
