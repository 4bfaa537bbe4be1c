#ifndef CPSSPERSO_FORMAT_HPP_
#define CPSSPERSO_FORMAT_HPP_

#include <charconv>
#include <string>
#include <system_error>

namespace cpssperso {

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

}  // namespace cpssperso

#endif  // CPSSPERSO_FORMAT_HPP_
