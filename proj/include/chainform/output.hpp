#pragma once

#include "config.hpp"
#include "errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace chainform {

// Write to a sibling temp file, then rename over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(bool(out), "cannot write " + tmp.string());
        out << content;
        out.flush();
        require(bool(out), "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ValidationError("cannot write " + path.string() + ": " + ec.message());
    }
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<double>& r)
    {
        std::vector<std::string> row;
        for (double x : r) row.push_back(fmt_num(x));
        add_row(std::move(row));
    }
    void add_row(std::vector<std::string> row)
    {
        require(row.size() == columns.size(), "row width does not match the schema");
        rows.push_back(std::move(row));
    }
    std::string csv() const
    {
        std::ostringstream o;
        for (size_t i = 0; i < columns.size(); ++i) o << (i ? "," : "") << columns[i];
        o << "\n";
        for (const auto& r : rows) {
            for (size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
            o << "\n";
        }
        return o.str();
    }
};

inline const std::vector<std::string>& node_columns()
{
    static const std::vector<std::string> c{"z", "s", "x", "A", "P", "D", "tau", "S_planner"};
    return c;
}

inline const std::vector<std::string>& aggregate_columns()
{
    static const std::vector<std::string> c{"f", "mu", "nu", "R", "Y", "W", "M", "G", "chi1", "chi2"};
    return c;
}

} // namespace chainform
