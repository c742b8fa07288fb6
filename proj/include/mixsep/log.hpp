#ifndef MIXSEP_LOG_HPP
#define MIXSEP_LOG_HPP

#include <string>

namespace mixsep::log {

enum class Level { Quiet = 0, Warn = 1, Info = 2 };

void set_level(Level level);
Level level();
void warn(const std::string& message);
void info(const std::string& message);

}  // namespace mixsep::log

#endif  // MIXSEP_LOG_HPP
