#include "fabricore/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace fabricore::logging {
namespace {

std::shared_ptr<spdlog::logger> make_logger()
{
  auto logger = spdlog::stderr_color_mt("fabricore");
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("FABRICORE_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  return logger;
}

spdlog::logger& logger()
{
  static const std::shared_ptr<spdlog::logger> instance = make_logger();
  return *instance;
}

}  // namespace

void warn(std::string_view message) { logger().warn("{}", message); }
void info(std::string_view message) { logger().info("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

void set_level(std::string_view level) { logger().set_level(spdlog::level::from_str(std::string(level))); }

}  // namespace fabricore::logging
