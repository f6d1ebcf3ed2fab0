#pragma once

#include <cstdio>
#include <string>

namespace hisd {

enum class LogLevel : int { Error = 0, Info = 1, Debug = 2 };

/// Global verbosity for the diagnostic stream (stderr).  Initialised from the
/// HISD_LOG environment variable ("error" | "info" | "debug"); defaults to Info.
LogLevel log_level();
void set_log_level(LogLevel level);

/// Read HISD_LOG from the environment and apply it.  Unknown values are ignored.
void init_log_from_env();

namespace detail {
void log_line(LogLevel level, const char* tag, const std::string& msg);
} // namespace detail

inline void log_error(const std::string& msg) { detail::log_line(LogLevel::Error, "error", msg); }
inline void log_warn(const std::string& msg)  { detail::log_line(LogLevel::Error, "warning", msg); }
inline void log_info(const std::string& msg)  { detail::log_line(LogLevel::Info, "info", msg); }
inline void log_debug(const std::string& msg) { detail::log_line(LogLevel::Debug, "debug", msg); }

} // namespace hisd
