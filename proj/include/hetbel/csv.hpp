#pragma once

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "params.hpp"

namespace hetbel {

/// In-memory table written as comma-separated text with LF endings.
class CsvTable {
public:
    using Cell = std::variant<double, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<Cell> row) {
        detail::require(row.size() == header_.size(), "csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }

    std::string str() const {
        std::string s;
        line(s, header_);
        for (const auto& r : rows_) {
            std::vector<std::string> cells;
            for (const auto& c : r) cells.push_back(render(c));
            line(s, cells);
        }
        return s;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path + "'");
        out << str();
    }

    /// 17 significant digits, so every double survives a round trip.
    static std::string number(double v) {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
        return std::string(buf, r.ptr);
    }

private:
    static std::string render(const Cell& c) {
        if (const auto* d = std::get_if<double>(&c)) return number(*d);
        return std::get<std::string>(c);
    }
    static void line(std::string& s, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += ',';
            s += cells[i];
        }
        s += '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

}  // namespace hetbel
