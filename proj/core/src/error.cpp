// SPDX-License-Identifier: Apache-2.0
#include "linetrace/error.hpp"

namespace linetrace {

namespace {
std::string format_parse_error(const std::string& source, std::size_t line,
                               const std::string& field, const std::string& what) {
  std::string msg = source;
  if (line > 0) msg += ":" + std::to_string(line);
  if (!field.empty()) msg += ": field '" + field + "'";
  msg += ": " + what;
  return msg;
}
}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& field,
                       const std::string& what)
    : std::runtime_error(format_parse_error(source, line, field, what)),
      line_(line),
      field_(field) {}

}  // namespace linetrace
