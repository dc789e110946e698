#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <json.hpp>

#include "queryrec/errors.hpp"

namespace queryrec {

using json = nlohmann::json;

/// Calls `on_record(line_number, parsed)` for every parseable line and
/// `on_bad_line(line_number, line)` for every line that is not valid JSON.
/// Blank lines are ignored. Throws IoError if the file cannot be opened.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(std::size_t, const json&)>& on_record,
                           const std::function<void(std::size_t, const std::string&)>& on_bad_line) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            on_bad_line(line_no, line);
        } else {
            on_record(line_no, record);
        }
    }
}

/// Writes `content` to `path` atomically: writes a sibling temp file, then
/// renames it over the destination.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw IoError("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

/// Reads a whole file into a string. Throws IoError if unreadable.
inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

inline void warn(const std::string& message) {
    std::cerr << "warning: " << message << "\n";
}

} // namespace queryrec
