#pragma once

// Minimal RFC-4180-ish CSV: quoted fields, escaped quotes, CRLF tolerance,
// UTF-8 passthrough. Header row is mandatory everywhere in this project.

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace compnet {

// Thrown for unrecoverable input problems (missing columns, bad header, ...).
// Row-level problems are reported, not thrown; see ingest.hpp.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace csv {

// One logical record; quoted fields may contain embedded newlines.
// Returns false at end of input. `line` is advanced to the line the
// record started on (1-based).
inline bool read_record(std::istream& in, std::vector<std::string>& fields,
                        std::size_t& line) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    ++line;

    std::string field;
    bool in_quotes = false;
    bool any = false;
    while (true) {
        if (c == EOF) {
            fields.push_back(std::move(field));
            return true;
        }
        any = true;
        if (in_quotes) {
            if (c == '"') {
                int nxt = in.peek();
                if (nxt == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    (void)any;
}

inline std::string strip_bom(std::string s) {
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
        static_cast<unsigned char>(s[1]) == 0xBB &&
        static_cast<unsigned char>(s[2]) == 0xBF)
        s.erase(0, 3);
    return s;
}

inline std::string trim(std::string_view v) {
    std::size_t b = 0, e = v.size();
    while (b < e && (v[b] == ' ' || v[b] == '\t')) ++b;
    while (e > b && (v[e - 1] == ' ' || v[e - 1] == '\t')) --e;
    return std::string(v.substr(b, e - b));
}

// Header-indexed table reader. Tolerates extra columns by design.
class Table {
public:
    explicit Table(std::istream& in) {
        std::size_t line = 0;
        std::vector<std::string> rec;
        if (!read_record(in, rec, line))
            throw ParseError("empty input: header row required");
        if (!rec.empty()) rec[0] = strip_bom(rec[0]);
        for (auto& h : rec) header_.push_back(trim(h));
        while (read_record(in, rec, line)) {
            if (rec.size() == 1 && rec[0].empty()) continue; // blank line
            rows_.push_back(rec);
            row_lines_.push_back(line);
        }
    }

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header_.size(); ++i)
            if (header_[i] == name) return i;
        return std::nullopt;
    }

    // First matching name among alternatives, or error naming them all.
    std::size_t require_column(std::initializer_list<std::string_view> names) const {
        for (auto n : names)
            if (auto i = column(n)) return *i;
        std::string msg = "missing required column (expected one of:";
        for (auto n : names) msg += " '" + std::string(n) + "'";
        msg += ")";
        throw ParseError(msg);
    }

    std::optional<std::size_t> optional_column(
        std::initializer_list<std::string_view> names) const {
        for (auto n : names)
            if (auto i = column(n)) return *i;
        return std::nullopt;
    }

    std::size_t size() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
    std::size_t line_of(std::size_t i) const { return row_lines_[i]; }
    const std::vector<std::string>& header() const { return header_; }

    // Missing trailing cells read as empty.
    std::string cell(std::size_t r, std::size_t c) const {
        const auto& row = rows_[r];
        return c < row.size() ? trim(row[c]) : std::string();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> row_lines_;
};

inline std::string quote_if_needed(std::string_view v) {
    bool need = v.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!need) return std::string(v);
    std::string out = "\"";
    for (char ch : v) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += '"';
    return out;
}

} // namespace csv

// Shortest round-trip decimal for doubles; locale-free and deterministic.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line) +
                         ": cannot parse number '" + std::string(s) + "'");
    return v;
}

inline std::optional<long long> try_parse_int(std::string_view s) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace compnet
