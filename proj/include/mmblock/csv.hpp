// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmblock::io {

/// Locale-independent shortest form with 6 significant digits.
std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column by name; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> numeric_column(std::string_view name) const;
};

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    const CsvTable& table() const noexcept { return table_; }

private:
    CsvTable table_;
};

/// Plain comma-separated text, no quoting. Blank lines are skipped.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

/// Thrown when a loss dataset contains rows that are not finite numbers.
class DatasetError : public std::runtime_error {
public:
    DatasetError(std::string message, std::vector<std::size_t> lines)
        : std::runtime_error(std::move(message)), bad_lines(std::move(lines))
    {
    }

    std::vector<std::size_t> bad_lines; // 1-based
};

/// Single-column dataset with header `loss_db`.
std::vector<double> parse_loss_dataset(std::string_view text);

} // namespace mmblock::io
