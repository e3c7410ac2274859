#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "delone/error.hpp"
#include "delone/point_set.hpp"
#include "delone/region.hpp"

namespace delone {

using Json = nlohmann::json;

/// Parses JSON text; syntax errors become schema errors carrying the line and
/// column of the offending byte.
inline Json parse_json(const std::string& text, const std::string& source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    fail(ErrorKind::schema, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path);
  out << text;
  out.flush();
  require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path);
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

namespace detail {

inline const Json& field(const Json& j, const std::string& name, const std::string& where) {
  require(j.is_object(), ErrorKind::schema, where + " must be an object");
  auto it = j.find(name);
  require(it != j.end(), ErrorKind::schema, "missing field '" + where + "." + name + "'");
  return *it;
}

template <class T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::schema, "field '" + where + "' has the wrong type");
  }
}

inline Vec vec_field(const Json& j, const std::string& name, const std::string& where, int dim) {
  Vec v = get_as<Vec>(field(j, name, where), where + "." + name);
  require(static_cast<int>(v.size()) == dim, ErrorKind::schema,
          "field '" + where + "." + name + "' has " + std::to_string(v.size()) + " entries, dimension is " +
              std::to_string(dim));
  return v;
}

}  // namespace detail

inline Json region_to_json(const Region& r) {
  if (r.is_box()) return {{"kind", "box"}, {"lo", r.lo()}, {"hi", r.hi()}};
  return {{"kind", "ball"}, {"center", r.center()}, {"radius", r.radius()}};
}

inline Region region_from_json(const Json& j, int dim, const std::string& where = "region") {
  const auto kind = detail::get_as<std::string>(detail::field(j, "kind", where), where + ".kind");
  try {
    if (kind == "box")
      return Region::box(detail::vec_field(j, "lo", where, dim), detail::vec_field(j, "hi", where, dim));
    if (kind == "ball")
      return Region::ball(detail::vec_field(j, "center", where, dim),
                          detail::get_as<double>(detail::field(j, "radius", where), where + ".radius"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::schema) throw;
    fail(ErrorKind::schema, where + ": " + e.what());
  }
  fail(ErrorKind::schema, "field '" + where + ".kind' must be \"box\" or \"ball\"");
}

inline Json to_json(const ExactPointSet& set) {
  const int n = set.dimension(), s = set.rank();
  Json proj = Json::array();
  for (int i = 0; i < s; ++i)
    proj.push_back(std::vector<double>(set.projection().begin() + i * n, set.projection().begin() + (i + 1) * n));
  Json addr = Json::array();
  for (std::size_t i = 0; i < set.size(); ++i) addr.push_back(std::vector<std::int64_t>(set.address(i).begin(), set.address(i).end()));
  return {{"dimension", n}, {"rank", s}, {"projection", proj}, {"addresses", addr}, {"region", region_to_json(set.region())}};
}

inline Json to_json(const FloatPointSet& set) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < set.size(); ++i) pts.push_back(std::vector<double>(set.point(i).begin(), set.point(i).end()));
  return {{"dimension", set.dimension()}, {"tolerance", set.tolerance()}, {"points", pts},
          {"region", region_to_json(set.region())}};
}

inline ExactPointSet exact_set_from_json(const Json& j) {
  const int n = detail::get_as<int>(detail::field(j, "dimension", "set"), "set.dimension");
  const int s = detail::get_as<int>(detail::field(j, "rank", "set"), "set.rank");
  require(n >= 1 && s >= n, ErrorKind::schema, "need 1 <= dimension <= rank");
  const auto& pj = detail::field(j, "projection", "set");
  require(pj.is_array() && pj.size() == static_cast<std::size_t>(s), ErrorKind::schema,
          "projection must have rank = " + std::to_string(s) + " rows");
  std::vector<double> proj;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    auto row = detail::get_as<Vec>(pj[i], "set.projection[" + std::to_string(i) + "]");
    require(static_cast<int>(row.size()) == n, ErrorKind::schema,
            "projection row " + std::to_string(i) + " must have dimension entries");
    proj.insert(proj.end(), row.begin(), row.end());
  }
  const auto& aj = detail::field(j, "addresses", "set");
  require(aj.is_array(), ErrorKind::schema, "field 'set.addresses' must be an array");
  std::vector<std::int64_t> addr;
  for (std::size_t i = 0; i < aj.size(); ++i) {
    auto row = detail::get_as<std::vector<std::int64_t>>(aj[i], "set.addresses[" + std::to_string(i) + "]");
    require(static_cast<int>(row.size()) == s, ErrorKind::schema,
            "address row " + std::to_string(i) + " has " + std::to_string(row.size()) + " entries, rank is " +
                std::to_string(s));
    addr.insert(addr.end(), row.begin(), row.end());
  }
  Region region = region_from_json(detail::field(j, "region", "set"), n);
  try {
    return ExactPointSet(n, s, std::move(proj), std::move(addr), std::move(region));
  } catch (const Error& e) {
    fail(ErrorKind::schema, e.what());
  }
}

/// Rows are checked against the header dimension before the set is built;
/// points closer than the tolerance are rejected with the offending pairs.
inline FloatPointSet float_set_from_json(const Json& j) {
  const int n = detail::get_as<int>(detail::field(j, "dimension", "set"), "set.dimension");
  require(n >= 1, ErrorKind::schema, "dimension must be >= 1");
  const double tol = detail::get_as<double>(detail::field(j, "tolerance", "set"), "set.tolerance");
  const auto& pj = detail::field(j, "points", "set");
  require(pj.is_array(), ErrorKind::schema, "field 'set.points' must be an array");
  std::vector<double> pts;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    auto row = detail::get_as<Vec>(pj[i], "set.points[" + std::to_string(i) + "]");
    require(static_cast<int>(row.size()) == n, ErrorKind::schema,
            "point row " + std::to_string(i) + " has " + std::to_string(row.size()) + " entries, dimension is " +
                std::to_string(n));
    pts.insert(pts.end(), row.begin(), row.end());
  }
  Region region = region_from_json(detail::field(j, "region", "set"), n);
  try {
    return FloatPointSet(n, std::move(pts), std::move(region), tol);
  } catch (const Error& e) {
    fail(ErrorKind::schema, e.what());
  }
}

inline ExactPointSet import_exact_set(const std::string& path) { return exact_set_from_json(read_json_file(path)); }
inline FloatPointSet import_float_set(const std::string& path) { return float_set_from_json(read_json_file(path)); }

}  // namespace delone
