#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hpz/error.hpp"

namespace hpz::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_number(row[k]);
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const Table& t) {
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
        nlohmann::json col = nlohmann::json::array();
        for (const auto& row : t.rows) {
            // JSON has no NaN; null marks a value that is not defined
            if (std::isfinite(row[k])) col.push_back(row[k]);
            else col.push_back(nullptr);
        }
        cols[t.columns[k]] = std::move(col);
    }
    return {{"name", t.name}, {"columns", t.columns}, {"data", cols}};
}

Table parse_csv(const std::string& text, const std::string& name) {
    Table t;
    t.name = name;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV file '" + name + "'");
    std::stringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.columns.size()) throw ConfigError("ragged CSV row in '" + name + "'");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace hpz::cli
