#pragma once

#include <functional>
#include <string>

namespace twoloop {

enum class LogLevel { Info, Warning };

using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Replaces the process-wide sink (stderr by default). Passing an empty
/// function silences logging.
void set_log_sink(LogSink sink);
void log_message(LogLevel level, const std::string& message);
inline void log_warning(const std::string& message) { log_message(LogLevel::Warning, message); }
inline void log_info(const std::string& message) { log_message(LogLevel::Info, message); }

}  // namespace twoloop
