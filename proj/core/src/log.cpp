#include "amnl/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace amnl {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("IRM_LOG");
    if (env == nullptr) return LogLevel::kInfo;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    return LogLevel::kInfo;
  }();
  return level;
}

void log_error(const std::string& msg) { std::fprintf(stderr, "[amnl] error: %s\n", msg.c_str()); }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::fprintf(stderr, "[amnl] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) std::fprintf(stderr, "[amnl] debug: %s\n", msg.c_str());
}

}  // namespace amnl
