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
#include "iges/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "iges/errors.hpp"

namespace iges::csv {

void write(const std::filesystem::path& path, const std::vector<std::string>& columns,
           const Matrix& values) {
    if (static_cast<Index>(columns.size()) != values.cols())
        throw IoError("csv::write: header/value column mismatch for " + path.string());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "step";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    char buf[32];
    for (Index r = 0; r < values.rows(); ++r) {
        out << (r + 1);
        for (Index c = 0; c < values.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("short write to " + path.string());
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty csv: " + path.string());
    Table table;
    {
        std::stringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                if (cell != "step") throw ParseError(path.string() + ": first column must be step");
                first = false;
            } else {
                table.columns.push_back(cell);
            }
        }
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            if (first) {
                first = false;
                continue;
            }
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (row.size() != table.columns.size())
            throw ParseError(path.string() + ": ragged row " + std::to_string(rows.size() + 2));
        rows.push_back(std::move(row));
    }
    table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return table;
}

}  // namespace iges::csv
