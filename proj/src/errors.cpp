#include "dropsvm/errors.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace dropsvm {

namespace {
std::atomic<bool> g_warnings_enabled{true};
std::mutex g_warn_mutex;
}  // namespace

void warn(const std::string& message) {
  if (!g_warnings_enabled.load()) return;
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  std::cerr << "warning: " << message << '\n';
}

bool set_warnings_enabled(bool enabled) {
  return g_warnings_enabled.exchange(enabled);
}

}  // namespace dropsvm
