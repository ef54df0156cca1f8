#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

namespace softbound {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `location` is a line number (text formats) or a
/// byte offset (binary formats); `what()` already carries it.
class FormatError : public Error {
public:
    FormatError(const std::string& msg, std::size_t location)
        : Error(msg), location_(location) {}
    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

/// A value violates a domain-type invariant.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Shapes of matrices/vectors do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Diagnostics go to stderr unless a test swaps the sink.
using WarningSink = std::function<void(const std::string&)>;

namespace detail {
inline WarningSink& warning_sink() {
    static WarningSink sink = [](const std::string& msg) {
        std::cerr << "warning: " << msg << '\n';
    };
    return sink;
}
inline std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

inline void warn(const std::string& msg) {
    std::lock_guard lock(detail::warning_mutex());
    detail::warning_sink()(msg);
}

/// Replaces the warning sink and returns the previous one.
inline WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(detail::warning_mutex());
    auto old = std::move(detail::warning_sink());
    detail::warning_sink() = std::move(sink);
    return old;
}

}  // namespace softbound
