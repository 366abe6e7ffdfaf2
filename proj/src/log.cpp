#include "qrefl/log.hpp"

#include <iostream>
#include <mutex>

namespace qrefl {
namespace {

std::mutex sink_mutex;
std::function<void(std::string_view)> current_sink;

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (current_sink) {
    current_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

std::function<void(std::string_view)> set_warning_sink(std::function<void(std::string_view)> sink) {
  std::lock_guard lock(sink_mutex);
  auto previous = std::move(current_sink);
  current_sink = std::move(sink);
  return previous;
}

}  // namespace qrefl
