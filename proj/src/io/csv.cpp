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

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmblock/csv.hpp"

namespace mmblock::io {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

template <typename F>
void for_each_line(std::string_view text, F&& f)
{
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        f(line_no, text.substr(start, end - start));
        start = end + 1;
    }
}

} // namespace

std::string format_number(double value)
{
    if (value == 0.0)
        return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw std::out_of_range("csv: no column named '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const
{
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double v = 0.0;
        if (c >= rows[r].size() || !parse_double(rows[r][c], v))
            throw std::invalid_argument("csv: row " + std::to_string(r + 1) + " of column '" + std::string(name)
                                        + "' is not a number");
        out.push_back(v);
    }
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
{
    if (header.empty())
        throw std::invalid_argument("csv: empty header");
    table_.header = std::move(header);
}

void CsvWriter::add_row(std::vector<std::string> cells)
{
    if (cells.size() != table_.header.size())
        throw std::invalid_argument("csv: row width does not match header");
    table_.rows.push_back(std::move(cells));
}

void CsvWriter::add_row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values)
        cells.push_back(format_number(v));
    add_row(std::move(cells));
}

std::string CsvWriter::str() const
{
    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    emit(table_.header);
    for (const auto& row : table_.rows)
        emit(row);
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    bool have_header = false;
    for_each_line(text, [&](std::size_t, std::string_view line) {
        if (trim(line).empty())
            return;
        if (!have_header) {
            table.header = split(line);
            have_header = true;
        } else {
            table.rows.push_back(split(line));
        }
    });
    if (!have_header)
        throw std::invalid_argument("csv: no header line");
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    return parse_csv(read_text_file(path));
}

void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> parse_loss_dataset(std::string_view text)
{
    std::vector<double> values;
    std::vector<std::size_t> bad;
    bool have_header = false;
    bool header_ok = true;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        line = trim(line);
        if (line.empty())
            return;
        if (!have_header) {
            if (line != "loss_db") {
                bad.push_back(line_no);
                header_ok = false;
            }
            have_header = true;
            return;
        }
        double v = 0.0;
        if (parse_double(line, v) && std::isfinite(v))
            values.push_back(v);
        else
            bad.push_back(line_no);
    });
    if (!have_header)
        throw DatasetError("dataset: empty file, expected header 'loss_db'", {});
    if (!bad.empty()) {
        std::string msg = header_ok ? "dataset: unparseable line(s)"
                                    : "dataset: expected header 'loss_db'; bad line(s)";
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i)
            msg += (i ? ", " : " ") + std::to_string(bad[i]);
        if (bad.size() > 20)
            msg += " ...";
        throw DatasetError(msg, std::move(bad));
    }
    if (values.empty())
        throw DatasetError("dataset: no values", {});
    return values;
}

} // namespace mmblock::io
