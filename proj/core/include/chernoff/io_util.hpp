#ifndef CHERNOFF_IO_UTIL_HPP
#define CHERNOFF_IO_UTIL_HPP

#include <string>

namespace chernoff {

// Writes content to a temporary sibling file and renames it into place, so
// readers never observe a half-written file.
void atomic_write_text(const std::string& path, const std::string& content);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// RFC3339-ish local timestamp used in report headers.
std::string timestamp_now();

}  // namespace chernoff

#endif
