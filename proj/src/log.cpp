#include "hisd/log.hpp"

#include <cstdlib>
#include <cstring>

namespace hisd {

namespace {
LogLevel g_level = LogLevel::Info;
}

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void init_log_from_env() {
    const char* v = std::getenv("HISD_LOG");
    if (!v) return;
    if (std::strcmp(v, "error") == 0) g_level = LogLevel::Error;
    else if (std::strcmp(v, "info") == 0) g_level = LogLevel::Info;
    else if (std::strcmp(v, "debug") == 0) g_level = LogLevel::Debug;
}

namespace detail {

void log_line(LogLevel level, const char* tag, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(g_level)) return;
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
    std::fflush(stderr);
}

} // namespace detail

} // namespace hisd
