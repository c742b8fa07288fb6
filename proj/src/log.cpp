#include "mixsep/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace mixsep::log {

namespace {
std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;
}  // namespace

void set_level(Level l) { g_level = l; }
Level level() { return g_level; }

void warn(const std::string& message) {
  if (g_level < Level::Warn) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "mixsep: warning: " << message << '\n';
}

void info(const std::string& message) {
  if (g_level < Level::Info) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "mixsep: " << message << '\n';
}

}  // namespace mixsep::log
