#include "coordnet/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace coordnet {

namespace {

LogLevel parse_level(const char* value) {
    if (value == nullptr) return LogLevel::warn;
    std::string v(value);
    if (v == "error") return LogLevel::error;
    if (v == "warn" || v == "warning") return LogLevel::warn;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

}  // namespace

LogLevel log_threshold() {
    static const LogLevel threshold = parse_level(std::getenv("COORDNET_LOG"));
    return threshold;
}

void log(LogLevel level, std::string_view message) {
    if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
    std::fprintf(stderr, "coordnet %s: %.*s\n", level_name(level),
                 static_cast<int>(message.size()), message.data());
}

}  // namespace coordnet
