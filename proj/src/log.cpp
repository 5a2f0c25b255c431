#include "upb/log.hpp"

#include <iostream>
#include <mutex>

namespace upb {
namespace {

std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s;
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = std::move(s);
}

void warn(const std::string& module, const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) {
    sink()(module, message);
  } else {
    std::clog << "warning [" << module << "]: " << message << '\n';
  }
}

}  // namespace upb
