#include "topolattice/format.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <system_error>

namespace topolattice {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 9);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

std::string format_int(long long value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void csv_row(std::string& out, const std::string* fields, int n_fields) {
  for (int i = 0; i < n_fields; ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  out.push_back('\n');
}

}  // namespace topolattice
