// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "linetrace/dataset/demo.hpp"
#include "linetrace/error.hpp"

namespace linetrace::dataset {

namespace {

std::string header() {
  std::string h;
  h.reserve(imaging::kInputSize * 9);
  for (std::size_t i = 0; i < imaging::kInputSize; ++i) {
    h += "pix_";
    h += std::to_string(i);
    h += ',';
  }
  h += "linear,angular";
  return h;
}

void append_real(std::string& out, double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, end);
}

}  // namespace

std::string to_csv(const DemoSet& set) {
  std::string out = header();
  out += '\n';
  out.reserve(out.size() + set.size() * (2 * imaging::kInputSize + 48));
  for (const DemoRecord& r : set.records) {
    for (double px : r.input) {
      out += px != 0.0 ? '1' : '0';
      out += ',';
    }
    append_real(out, r.linear);
    out += ',';
    append_real(out, r.angular);
    out += '\n';
  }
  return out;
}

void write_csv(const DemoSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write demo CSV " + path.string());
  const std::string text = to_csv(set);
  out.write(text.data(), std::streamsize(text.size()));
}

DemoSet parse_csv(const std::string& text, const std::string& source) {
  DemoSet set;
  set.provenance = Provenance::File;
  std::string_view rest(text);
  std::size_t line_no = 0;
  const auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    const std::size_t nl = rest.find('\n');
    line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line != header()) {
    throw ParseError(source, 1, "header", "expected pix_0,...,pix_1023,linear,angular");
  }
  const std::size_t columns = imaging::kInputSize + 2;
  while (next_line(line)) {
    if (line.empty()) continue;
    DemoRecord r;
    std::size_t col = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view field = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
      if (col < imaging::kInputSize) {
        if (field == "0") {
          r.input[col] = 0.0;
        } else if (field == "1") {
          r.input[col] = 1.0;
        } else {
          throw ParseError(source, line_no, "pix_" + std::to_string(col), "pixel must be 0 or 1");
        }
      } else if (col < columns) {
        double v = 0.0;
        auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        const char* name = col == imaging::kInputSize ? "linear" : "angular";
        if (ec != std::errc{} || end != field.data() + field.size()) {
          throw ParseError(source, line_no, name, "not a number");
        }
        if (!std::isfinite(v)) throw ParseError(source, line_no, name, "non-finite velocity");
        (col == imaging::kInputSize ? r.linear : r.angular) = v;
      }
      ++col;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (col != columns) {
      throw ParseError(source, line_no, "", "row has " + std::to_string(col) + " columns, expected " +
                                                std::to_string(columns));
    }
    if (!is_unit_or_zero(r.linear, r.angular)) {
      throw ParseError(source, line_no, "linear,angular", "velocity is neither unit-norm nor zero");
    }
    set.records.push_back(r);
  }
  return set;
}

DemoSet read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("demo CSV not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

}  // namespace linetrace::dataset
