#pragma once

#include <string>

namespace atlas::log {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

/// Reads ATLAS_LOG (error|info|debug); unset or unknown means info.
void InitFromEnvironment();
void SetLevel(Level level);

void Error(const std::string& msg);
void Info(const std::string& msg);
void Debug(const std::string& msg);

}  // namespace atlas::log
