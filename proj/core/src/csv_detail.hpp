#pragma once

#include <charconv>
#include <ostream>
#include <string_view>

namespace workbench::detail {

// Shortest round-trip decimal form, independent of the stream locale.
inline void write_number(std::ostream& out, double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  out.write(buffer, result.ptr - buffer);
}

inline void write_row(std::ostream& out, double a, double b) {
  write_number(out, a);
  out.put(',');
  write_number(out, b);
  out.put('\n');
}

}  // namespace workbench::detail
