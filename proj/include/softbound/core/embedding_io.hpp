#pragma once

// EMB1 binary layout (all little-endian):
//   "EMB1" | u32 rows | u32 dim | rows*dim float32, row-major
// CSV fallback: one row per line, comma-separated decimals.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "softbound/core/matrix.hpp"
#include "softbound/error.hpp"

namespace softbound {

inline constexpr std::array<char, 4> kEmbMagic{'E', 'M', 'B', '1'};

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

inline void write_u32_le(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses an in-memory EMB1 buffer.
inline EmbeddingMatrix parse_embeddings_binary(std::string_view bytes, const std::string& name = "<buffer>") {
    constexpr std::size_t header = 12;
    if (bytes.size() < header || std::memcmp(bytes.data(), kEmbMagic.data(), 4) != 0)
        throw FormatError(name + ": missing EMB1 header at byte 0", 0);
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t rows = detail::read_u32_le(raw + 4);
    const std::uint32_t dim = detail::read_u32_le(raw + 8);
    if (rows == 0 || dim == 0)
        throw FormatError(name + ": rows and dim must be positive (byte 4)", 4);
    const std::size_t expected = header + std::size_t(rows) * dim * 4;
    if (bytes.size() != expected)
        throw FormatError(name + ": payload size " + std::to_string(bytes.size()) +
                              " does not match header (" + std::to_string(expected) + " bytes)",
                          std::min(bytes.size(), expected));
    std::vector<double> data(std::size_t(rows) * dim);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const std::size_t off = header + 4 * k;
        const auto bits = detail::read_u32_le(raw + off);
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v))
            throw FormatError(name + ": non-finite value in row " + std::to_string(k / dim) +
                                  " at byte " + std::to_string(off),
                              off);
        data[k] = static_cast<double>(v);
    }
    return EmbeddingMatrix(rows, dim, std::move(data));
}

/// Parses CSV text: one matrix row per line.
inline EmbeddingMatrix parse_embeddings_csv(std::string_view text, const std::string& name = "<buffer>") {
    std::vector<double> data;
    std::size_t dim = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t cols = 0;
        while (true) {
            const auto comma = line.find(',');
            const auto cell = detail::trim(line.substr(0, comma));
            double v = 0.0;
            const auto* first = cell.data();
            const auto* last = cell.data() + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc{} || ptr != last)
                throw FormatError(name + ": line " + std::to_string(line_no) + ": bad number '" +
                                      std::string(cell) + "'",
                                  line_no);
            if (!std::isfinite(v))
                throw FormatError(name + ": non-finite value in row " + std::to_string(rows) +
                                      " (line " + std::to_string(line_no) + ")",
                                  line_no);
            data.push_back(v);
            ++cols;
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (rows == 0) {
            dim = cols;
        } else if (cols != dim) {
            throw FormatError(name + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cols) + " columns, expected " + std::to_string(dim),
                              line_no);
        }
        ++rows;
    }
    if (rows == 0) throw FormatError(name + ": no rows", 0);
    return EmbeddingMatrix(rows, dim, std::move(data));
}

/// Loads an EMB1 file, or a CSV file when the magic bytes are absent.
inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kEmbMagic.data(), 4) == 0)
        return parse_embeddings_binary(bytes, path.string());
    return parse_embeddings_csv(bytes, path.string());
}

/// Encodes as EMB1. Values are narrowed to float32.
inline std::string encode_embeddings_binary(const EmbeddingMatrix& m) {
    std::string out(kEmbMagic.begin(), kEmbMagic.end());
    detail::write_u32_le(out, static_cast<std::uint32_t>(m.rows()));
    detail::write_u32_le(out, static_cast<std::uint32_t>(m.dim()));
    out.reserve(out.size() + m.data().size() * 4);
    for (double v : m.data()) detail::write_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return out;
}

inline void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    if (m.empty()) throw InvariantError("refusing to write an empty embedding matrix");
    const auto bytes = encode_embeddings_binary(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace softbound
