#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hpz::cli {

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) { rows.push_back(std::move(row)); }
};

// 17 significant digits, '.' decimal, '\n' line endings; NaN written as "nan".
std::string format_number(double v);
std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);
Table parse_csv(const std::string& text, const std::string& name);

// Write-temp-then-rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hpz::cli
