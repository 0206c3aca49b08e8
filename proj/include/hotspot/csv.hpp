#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
// newlines, CRLF or LF line endings. Parsing is locale-independent.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // Reads one record; returns false at end of input.
    bool next(std::vector<std::string>& fields) {
        fields.clear();
        int c = in_.get();
        if (c == EOF) return false;
        std::string field;
        bool quoted = false;
        bool any = false;
        while (true) {
            if (quoted) {
                if (c == EOF) throw data_error("csv: unterminated quoted field at end of input");
                if (c == '"') {
                    int peek = in_.get();
                    if (peek == '"') {
                        field.push_back('"');
                    } else {
                        quoted = false;
                        c = peek;
                        continue;  // re-dispatch the char after the closing quote
                    }
                } else {
                    field.push_back(static_cast<char>(c));
                }
            } else {
                if (c == EOF || c == '\n') {
                    break;
                } else if (c == '\r') {
                    int peek = in_.peek();
                    if (peek == '\n') in_.get();
                    break;
                } else if (c == ',') {
                    fields.push_back(std::move(field));
                    field.clear();
                    any = true;
                } else if (c == '"' && field.empty()) {
                    quoted = true;
                } else {
                    field.push_back(static_cast<char>(c));
                }
            }
            c = in_.get();
        }
        fields.push_back(std::move(field));
        (void)any;
        return true;
    }

private:
    std::istream& in_;
};

inline std::string csv_quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

// Writer emitting LF-terminated rows with minimal quoting.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_quote(fields[i]);
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

// Shortest round-trip decimal rendering, locale independent.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw data_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    // Trim ASCII whitespace; upstream exports pad some numeric cells.
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw data_error("write failed: " + path);
}

}  // namespace hotspot
