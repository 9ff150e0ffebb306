#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace sqz {

inline constexpr const char* kVersion = "0.1.0";

// Base class for all toolkit errors. Subcommands catch this at the top
// level and turn it into a nonzero exit code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated precondition or type invariant (caller bug).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// A reward component or scorer failed during evaluation.
class RewardError : public Error {
public:
    explicit RewardError(const std::string& msg) : Error(msg) {}
};

// Input longer than the policy backend accepts. Never truncated silently.
class OverLengthError : public Error {
public:
    explicit OverLengthError(const std::string& msg) : Error(msg) {}
};

// Unreadable file, malformed config, bad checkpoint.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

namespace log {

template <typename... Args>
inline void warn(const char* fmt, Args... args) {
    std::fprintf(stderr, "[warn] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
}

template <typename... Args>
inline void info(const char* fmt, Args... args) {
    std::fprintf(stderr, "[info] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
}

inline void warn(const char* msg) { warn("%s", msg); }
inline void info(const char* msg) { info("%s", msg); }

} // namespace log

} // namespace sqz
