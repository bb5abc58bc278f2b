#include "atlas/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace atlas::log {
namespace {

std::shared_ptr<spdlog::logger> Logger() {
  static auto logger = [] {
    auto l = spdlog::stderr_logger_st("atlas");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::info);
    return l;
  }();
  return logger;
}

}  // namespace

void SetLevel(Level level) {
  switch (level) {
    case Level::kError: Logger()->set_level(spdlog::level::err); break;
    case Level::kInfo: Logger()->set_level(spdlog::level::info); break;
    case Level::kDebug: Logger()->set_level(spdlog::level::debug); break;
  }
}

void InitFromEnvironment() {
  const char* env = std::getenv("ATLAS_LOG");
  const std::string_view v = env ? env : "info";
  if (v == "error") {
    SetLevel(Level::kError);
  } else if (v == "debug") {
    SetLevel(Level::kDebug);
  } else {
    SetLevel(Level::kInfo);
  }
}

void Error(const std::string& msg) { Logger()->error(msg); }
void Info(const std::string& msg) { Logger()->info(msg); }
void Debug(const std::string& msg) { Logger()->debug(msg); }

}  // namespace atlas::log
