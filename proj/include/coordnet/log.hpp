#pragma once

#include <string_view>

namespace coordnet {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Threshold read once from COORDNET_LOG (error|warn|info|debug, default warn).
LogLevel log_threshold();

/// Writes one diagnostic line to stderr when `level` passes the threshold.
void log(LogLevel level, std::string_view message);

inline void log_error(std::string_view m) { log(LogLevel::error, m); }
inline void log_warn(std::string_view m) { log(LogLevel::warn, m); }
inline void log_info(std::string_view m) { log(LogLevel::info, m); }
inline void log_debug(std::string_view m) { log(LogLevel::debug, m); }

}  // namespace coordnet
