#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "softbound/error.hpp"

namespace softbound {

using json = nlohmann::json;

enum class Strictness { fatal, lenient };

/// Rounds to 9 significant digits, the precision used by every text format.
inline double text_round(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

/// Calls `fn(object, line_number)` for each non-blank line. Parse errors are
/// FormatErrors carrying the line number.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw FormatError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what(),
                              line_no);
        }
        if (!j.is_object())
            throw FormatError(path.string() + ": line " + std::to_string(line_no) +
                                  ": expected a JSON object",
                              line_no);
        fn(j, line_no);
    }
}

namespace detail {

template <typename T>
T field(const json& j, const char* key, std::size_t line_no) {
    const auto it = j.find(key);
    if (it == j.end())
        throw FormatError("line " + std::to_string(line_no) + ": missing field '" + key + "'", line_no);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError("line " + std::to_string(line_no) + ": field '" + key + "' has wrong type",
                          line_no);
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail
}  // namespace softbound
