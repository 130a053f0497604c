/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

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

#include "anytime/profile.hpp"

namespace anytime::io {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format(double x);

/// Minimal CSV writer. Cells are written as given; use format() for numbers.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells);

private:
    struct Impl;
    Impl* impl_;
};

void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfileRecord>& records);
std::vector<ProfileRecord> read_profile_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logy = false;
};

/// Static SVG polyline chart.
std::string svg_lines(const std::vector<Series>& series, const PlotOptions& opt);

/// One horizontal strip per processor; busy phases light, waits dark.
std::string svg_gantt(const std::vector<ProfileRecord>& records, const std::string& title);

}  // namespace anytime::io
