#include "combsynth/logging.hpp"

#include <atomic>

namespace combsynth {

namespace {
std::atomic<LogLevel> g_threshold{LogLevel::warn};

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}
}  // namespace

LogLevel log_threshold() { return g_threshold.load(); }

void set_log_threshold(LogLevel level) { g_threshold.store(level); }

bool set_log_threshold(const std::string& name) {
    if (name == "error") set_log_threshold(LogLevel::error);
    else if (name == "warn") set_log_threshold(LogLevel::warn);
    else if (name == "info") set_log_threshold(LogLevel::info);
    else if (name == "debug") set_log_threshold(LogLevel::debug);
    else return false;
    return true;
}

void log_line(LogLevel level, const std::string& message) {
    if (level > g_threshold.load()) return;
    std::fprintf(stderr, "combsynth [%s] %s\n", level_tag(level), message.c_str());
}

}  // namespace combsynth
