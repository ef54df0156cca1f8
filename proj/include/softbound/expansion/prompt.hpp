#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "softbound/error.hpp"

namespace softbound::expansion {

/// Bumping this invalidates every cached expansion.
inline constexpr const char* kPromptVersion = "boundary-v1";

enum class ExpansionErrorKind { empty_action, network, unparseable, offline_miss };

class ExpansionError : public Error {
public:
    ExpansionError(ExpansionErrorKind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    ExpansionErrorKind kind() const noexcept { return kind_; }

private:
    ExpansionErrorKind kind_;
};

namespace detail {

inline std::string trim_copy(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline bool iequals_prefix(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        if (std::toupper(static_cast<unsigned char>(s[k])) != prefix[k]) return false;
    }
    return true;
}

// "START: text", "**End** - text", "start : text" -> text; nullopt-like empty otherwise.
inline std::string labeled_value(std::string_view line, std::string_view label) {
    std::size_t k = 0;
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '*' || line[k] == '#' ||
                               line[k] == '-' || line[k] == '>'))
        ++k;
    line.remove_prefix(k);
    if (!iequals_prefix(line, label)) return {};
    line.remove_prefix(label.size());
    k = 0;
    while (k < line.size() && (line[k] == ' ' || line[k] == '*' || line[k] == '\t')) ++k;
    if (k >= line.size() || (line[k] != ':' && line[k] != '-')) return {};
    line.remove_prefix(k + 1);
    auto value = trim_copy(line);
    while (!value.empty() && value.front() == '*') value.erase(value.begin());
    return trim_copy(value);
}

inline std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        cur.push_back(c == '\n' || c == '\r' || c == '\t' ? ' ' : c);
        const bool terminal = c == '.' || c == '!' || c == '?';
        const bool at_break = k + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[k + 1]));
        if (terminal && at_break) {
            auto s = trim_copy(cur);
            if (!s.empty()) out.push_back(std::move(s));
            cur.clear();
        }
    }
    if (auto s = trim_copy(cur); !s.empty()) out.push_back(std::move(s));
    return out;
}

}  // namespace detail

/// The instruction sent to the LLM for one action. The action text is
/// whitespace-trimmed; an empty action is rejected.
inline std::string build_prompt(std::string_view action_text) {
    const auto action = detail::trim_copy(action_text);
    if (action.empty()) throw ExpansionError(ExpansionErrorKind::empty_action, "empty action text");
    std::string p;
    p += "Please describe the beginning and ending process in one sentence of the following action ";
    p += action;
    p += ".\n";
    p += "The description you generate cannot contain any objects that are not presented in the action.\n";
    p += "Answer with exactly two lines and nothing else:\n";
    p += "START: <one sentence describing how the action begins>\n";
    p += "END: <one sentence describing how the action ends>";
    return p;
}

/// Extracts (start, end) descriptions from a model reply. Labeled
/// START/END lines win; otherwise the first two sentences are used.
inline std::pair<std::string, std::string> parse_expansion(std::string_view raw) {
    std::string start, end;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto nl = raw.find('\n', pos);
        const auto line = raw.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (start.empty()) start = detail::labeled_value(line, "START");
        if (end.empty()) end = detail::labeled_value(line, "END");
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (!start.empty() && !end.empty()) return {start, end};

    auto sentences = detail::split_sentences(raw);
    if (sentences.size() < 2)
        throw ExpansionError(ExpansionErrorKind::unparseable,
                             "could not extract start/end descriptions from response: '" +
                                 std::string(raw.substr(0, 120)) + "'");
    return {sentences[0], sentences[1]};
}

}  // namespace softbound::expansion
