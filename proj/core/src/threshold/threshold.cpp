// SPDX-License-Identifier: Apache-2.0
#include "linetrace/threshold/threshold.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "linetrace/error.hpp"

namespace linetrace::threshold {

using nlohmann::json;

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::H: return 'h';
    case Axis::S: return 's';
    case Axis::V: return 'v';
  }
  return '?';
}

Axis parse_axis(const std::string& token) {
  if (token == "h") return Axis::H;
  if (token == "s") return Axis::S;
  if (token == "v") return Axis::V;
  throw std::invalid_argument("unknown HSV axis '" + token + "'");
}

std::string threshold_to_json(const HsvThreshold& thr) {
  json clauses = json::array();
  for (const Clause& clause : thr.clauses) {
    json conj = json::array();
    for (const Conjunct& c : clause) {
      conj.push_back({{"axis", std::string(1, axis_name(c.axis))},
                      {"cmp", c.cmp == Comparator::Lt ? "lt" : "ge"},
                      {"value", c.value}});
    }
    clauses.push_back(std::move(conj));
  }
  json doc = {{"name", thr.name}, {"clauses", std::move(clauses)}};
  return doc.dump(2) + "\n";
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

HsvThreshold threshold_from_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of_offset(text, e.byte), "", "malformed JSON");
  }
  if (!doc.is_object()) throw ParseError(source, 0, "", "expected a JSON object");
  HsvThreshold thr;
  if (!doc.contains("name") || !doc["name"].is_string()) {
    throw ParseError(source, 0, "name", "missing or not a string");
  }
  thr.name = doc["name"].get<std::string>();
  if (!doc.contains("clauses") || !doc["clauses"].is_array()) {
    throw ParseError(source, 0, "clauses", "missing or not an array");
  }
  const json& clauses = doc["clauses"];
  if (clauses.size() > 4) {
    throw ParseError(source, 0, "clauses", "a depth-2 tree yields at most 4 clauses");
  }
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const std::string where = "clauses[" + std::to_string(i) + "]";
    if (!clauses[i].is_array()) throw ParseError(source, 0, where, "expected an array of conjuncts");
    Clause clause;
    for (std::size_t j = 0; j < clauses[i].size(); ++j) {
      const json& c = clauses[i][j];
      const std::string at = where + "[" + std::to_string(j) + "]";
      if (!c.is_object()) throw ParseError(source, 0, at, "expected an object");
      Conjunct conj;
      if (!c.contains("axis") || !c["axis"].is_string()) throw ParseError(source, 0, at + ".axis", "missing");
      const std::string axis = c["axis"].get<std::string>();
      if (axis != "h" && axis != "s" && axis != "v") {
        throw ParseError(source, 0, at + ".axis", "expected h, s or v, got '" + axis + "'");
      }
      conj.axis = parse_axis(axis);
      if (!c.contains("cmp") || !c["cmp"].is_string()) throw ParseError(source, 0, at + ".cmp", "missing");
      const std::string cmp = c["cmp"].get<std::string>();
      if (cmp == "lt") {
        conj.cmp = Comparator::Lt;
      } else if (cmp == "ge") {
        conj.cmp = Comparator::Ge;
      } else {
        throw ParseError(source, 0, at + ".cmp", "expected 'lt' or 'ge', got '" + cmp + "'");
      }
      if (!c.contains("value") || !c["value"].is_number()) {
        throw ParseError(source, 0, at + ".value", "missing or not a number");
      }
      conj.value = c["value"].get<double>();
      clause.push_back(conj);
    }
    thr.clauses.push_back(std::move(clause));
  }
  return thr;
}

void save_threshold(const HsvThreshold& thr, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write threshold file " + path.string());
  out << threshold_to_json(thr);
}

HsvThreshold load_threshold(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("threshold file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return threshold_from_json(buf.str(), path.string());
}

std::filesystem::path threshold_path(const std::filesystem::path& dir, const std::string& color) {
  return dir / (color + ".threshold.json");
}

}  // namespace linetrace::threshold
