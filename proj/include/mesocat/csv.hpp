#pragma once

// CSV tables with a '#key=value' metadata block and unit-tagged headers.

#include "mesocat/core.hpp"

#include <map>
#include <ostream>
#include <sstream>

namespace mesocat {

struct CsvTable {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;  // "name[unit]"
    std::vector<std::vector<double>> rows;

    CsvTable& set(const std::string& k, const std::string& v) {
        meta[k] = v;
        return *this;
    }
    CsvTable& set(const std::string& k, double v) { return set(k, format_double(v)); }
    void add(std::vector<double> r) {
        if (r.size() != columns.size()) throw DomainError("CsvTable: row width mismatch");
        rows.push_back(std::move(r));
    }

    void write(std::ostream& os) const {
        os << "#version=" << version << '\n';
        for (auto& [k, v] : meta)
            if (k != "version") os << '#' << k << '=' << v << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
            os << '\n';
        }
    }
    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }
};

}  // namespace mesocat
