#pragma once

#include <string>

namespace amnl {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from the IRM_LOG environment variable (error|info|debug),
// read once; default info.
LogLevel log_level();

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace amnl
