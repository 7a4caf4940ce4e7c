#include "ghsnet/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace ghs {

namespace {

LogLevel from_env() {
    const char* raw = std::getenv("GHS_NET_LOG");
    if (!raw) return LogLevel::Warn;
    const std::string v(raw);
    if (v == "error") return LogLevel::Error;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

std::atomic<int>& current() {
    static std::atomic<int> level{static_cast<int>(from_env())};
    return level;
}

const char* tag(LogLevel level) {
    switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
    }
    return "?";
}

} // namespace

LogLevel log_level() { return static_cast<LogLevel>(current().load()); }
void set_log_level(LogLevel level) { current().store(static_cast<int>(level)); }
bool log_enabled(LogLevel level) { return static_cast<int>(level) <= current().load(); }

void log_message(LogLevel level, std::string_view message) {
    if (!log_enabled(level)) return;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << '[' << tag(level) << "] " << message << '\n';
}

} // namespace ghs
