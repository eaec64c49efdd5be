#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

// Diagnostics go to stderr only; stdout is reserved for tool output.
// Level comes from HYBRIDNAV_LOG (error|warn|info|debug), default warn.

namespace hnav::diag {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level threshold()
{
    static Level lvl = [] {
        const char* e = std::getenv("HYBRIDNAV_LOG");
        if (!e) return Level::Warn;
        if (!std::strcmp(e, "error")) return Level::Error;
        if (!std::strcmp(e, "warn")) return Level::Warn;
        if (!std::strcmp(e, "info")) return Level::Info;
        if (!std::strcmp(e, "debug")) return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(threshold()); }

template <typename... Args>
void log(Level l, const char* tag, const char* fmt, Args... args)
{
    if (!enabled(l)) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

template <typename... Args>
void error(const char* fmt, Args... args) { log(Level::Error, "error", fmt, args...); }
template <typename... Args>
void warn(const char* fmt, Args... args) { log(Level::Warn, "warn", fmt, args...); }
template <typename... Args>
void info(const char* fmt, Args... args) { log(Level::Info, "info", fmt, args...); }
template <typename... Args>
void debug(const char* fmt, Args... args) { log(Level::Debug, "debug", fmt, args...); }

}  // namespace hnav::diag
