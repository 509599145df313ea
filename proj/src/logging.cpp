#include "bipolar_formation/logging.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace bform {

namespace {

LogLevel parse_level(const char* raw) {
  if (raw == nullptr) return LogLevel::kWarn;
  const std::string s(raw);
  if (s == "error" || s == "0") return LogLevel::kError;
  if (s == "info" || s == "2") return LogLevel::kInfo;
  if (s == "debug" || s == "3") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

std::atomic<int>& threshold_storage() {
  static std::atomic<int> level{
      static_cast<int>(parse_level(std::getenv("BIPOLAR_FORM_LOG")))};
  return level;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::kError: return "error";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kInfo: return "info";
    case LogLevel::kDebug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold_storage().load()); }

void set_log_threshold(LogLevel level) { threshold_storage().store(static_cast<int>(level)); }

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > threshold_storage().load()) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[bipolar_form " << tag(level) << "] " << message << '\n';
}

}  // namespace bform
