#include "exset/error.hpp"

#include <iostream>
#include <mutex>

namespace exset {

ParseError::ParseError(const std::string& what, std::size_t byte_offset)
    : DataError(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}

namespace {

std::mutex warn_mutex;

WarningHandler& handler_slot() {
  static WarningHandler h = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warn_mutex);
  auto old = std::move(handler_slot());
  handler_slot() = std::move(handler);
  return old;
}

void warn(const std::string& message) {
  std::lock_guard lock(warn_mutex);
  if (handler_slot()) handler_slot()(message);
}

void fail_contract(const std::string& what) { throw ContractError(what); }

}  // namespace exset
