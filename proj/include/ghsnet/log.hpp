#pragma once

#include <string_view>

namespace ghs {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from GHS_NET_LOG (error, warn, info, debug), read once; default warn.
LogLevel log_level();
void set_log_level(LogLevel level);
bool log_enabled(LogLevel level);
/// Writes "[level] message" to stderr when the level is enabled.
void log_message(LogLevel level, std::string_view message);

} // namespace ghs
