#pragma once

#include <string_view>

namespace fabricore::logging {

// Verbosity comes from FABRICORE_LOG (trace, debug, info, warn, error, off); default warn.
void warn(std::string_view message);
void info(std::string_view message);
void debug(std::string_view message);

/// Override the level read from the environment.
void set_level(std::string_view level);

}  // namespace fabricore::logging
