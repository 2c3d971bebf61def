#include "pip2/common/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace pip2::log {

namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_mutex;
}  // namespace

void set_quiet(bool q) { g_quiet.store(q); }
bool quiet() { return g_quiet.load(); }

void info(std::string_view message) {
  if (quiet()) return;
  std::lock_guard lock(g_mutex);
  std::cerr << message << '\n';
}

void warn(std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::cerr << "warning: " << message << '\n';
}

}  // namespace pip2::log
