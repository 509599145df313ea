#pragma once

#include <string>

namespace bform {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Threshold from BIPOLAR_FORM_LOG (error|warn|info|debug or 0-3), read
/// once. Defaults to warn.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

void log_message(LogLevel level, const std::string& message);

}  // namespace bform
