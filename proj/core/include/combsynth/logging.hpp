#pragma once

#include <cstdio>
#include <string>

namespace combsynth {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_threshold();
void set_log_threshold(LogLevel level);
bool set_log_threshold(const std::string& name);  // "error".."debug"; false if unknown

void log_line(LogLevel level, const std::string& message);

inline void log_error(const std::string& m) { log_line(LogLevel::error, m); }
inline void log_warn(const std::string& m) { log_line(LogLevel::warn, m); }
inline void log_info(const std::string& m) { log_line(LogLevel::info, m); }
inline void log_debug(const std::string& m) { log_line(LogLevel::debug, m); }

}  // namespace combsynth
