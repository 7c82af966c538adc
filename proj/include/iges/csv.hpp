/*
    Copyright (C) 2026 by the iges project

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "iges/types.hpp"

namespace iges::csv {

struct Table {
    std::vector<std::string> columns;  // without the leading "step"
    Matrix values;                     // rows = steps
};

/// Wide CSV: header "step,<columns...>", one row per step (1-based step ids),
/// values printed with 17 significant digits so doubles round-trip exactly.
void write(const std::filesystem::path& path, const std::vector<std::string>& columns,
           const Matrix& values);

/// Throws IoError / ParseError.
Table read(const std::filesystem::path& path);

}  // namespace iges::csv
