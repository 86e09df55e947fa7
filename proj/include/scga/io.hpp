#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scga/engine.hpp"
#include "scga/errors.hpp"
#include "scga/point_cloud.hpp"
#include "scga/transform.hpp"

namespace scga {

enum class PointFileFormat { ply_ascii, xyz };

/// Picks the format from the file extension (.ply / .xyz, case-insensitive).
inline PointFileFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".ply") return PointFileFormat::ply_ascii;
  if (ext == ".xyz" || ext == ".txt") return PointFileFormat::xyz;
  throw std::domain_error("cannot infer point-file format from extension: " +
                          path.string());
}

namespace detail {

inline bool parse_double_token(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + token.size() && !token.empty();
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline PointCloud parse_xyz(std::istream& in, const std::string& path) {
  std::vector<Eigen::Vector3d> points;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 3)
      throw parse_error(path, line_no, "expected at least 3 coordinates");
    Eigen::Vector3d p;
    for (int c = 0; c < 3; ++c)
      if (!parse_double_token(tokens[static_cast<std::size_t>(c)], p[c]))
        throw parse_error(path, line_no,
                          "non-numeric coordinate '" +
                              tokens[static_cast<std::size_t>(c)] + "'");
    points.push_back(p);
  }
  if (points.empty())
    throw std::domain_error(path + ": file contains zero points");
  return PointCloud(std::move(points));
}

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<std::string> properties;  // scalar property names, in order
  bool has_list_property = false;
  int x = -1, y = -1, z = -1;  // property slots of the coordinates
};

inline PointCloud parse_ply(std::istream& in, const std::string& path) {
  std::string line;
  long line_no = 0;

  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw parse_error(path, line_no, std::string("unexpected end of file ") +
                                           what);
    ++line_no;
    line = strip_cr(line);
  };

  next_line("reading magic");
  if (line != "ply") throw parse_error(path, line_no, "missing 'ply' magic");

  std::vector<PlyElement> elements;
  bool format_seen = false;
  for (;;) {
    next_line("reading header");
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 3 || tokens[1] != "ascii" || tokens[2] != "1.0")
        throw parse_error(path, line_no,
                          "unsupported PLY format (need 'ascii 1.0')");
      format_seen = true;
      continue;
    }
    if (tokens[0] == "element") {
      if (tokens.size() != 3)
        throw parse_error(path, line_no, "malformed element declaration");
      PlyElement element;
      element.name = tokens[1];
      double count = 0;
      if (!parse_double_token(tokens[2], count) || count < 0)
        throw parse_error(path, line_no, "malformed element count");
      element.count = static_cast<long>(count);
      elements.push_back(element);
      continue;
    }
    if (tokens[0] == "property") {
      if (elements.empty())
        throw parse_error(path, line_no, "property before any element");
      if (tokens.size() >= 2 && tokens[1] == "list") {
        elements.back().has_list_property = true;
        continue;
      }
      if (tokens.size() != 3)
        throw parse_error(path, line_no, "malformed property declaration");
      PlyElement& element = elements.back();
      const int slot = static_cast<int>(element.properties.size());
      element.properties.push_back(tokens[2]);
      if (element.name == "vertex" &&
          (tokens[1] == "float" || tokens[1] == "double" ||
           tokens[1] == "float32" || tokens[1] == "float64")) {
        if (tokens[2] == "x") element.x = slot;
        if (tokens[2] == "y") element.y = slot;
        if (tokens[2] == "z") element.z = slot;
      }
      continue;
    }
    if (tokens[0] == "end_header") break;
    throw parse_error(path, line_no, "unrecognized header line");
  }
  if (!format_seen)
    throw parse_error(path, line_no, "missing 'format ascii 1.0' line");

  std::vector<Eigen::Vector3d> points;
  for (const auto& element : elements) {
    if (element.name != "vertex") {
      // Skip this element's data lines (one instance per line).
      for (long i = 0; i < element.count; ++i) next_line("skipping element");
      continue;
    }
    if (element.x < 0 || element.y < 0 || element.z < 0)
      throw parse_error(path, line_no,
                        "vertex element lacks float x/y/z properties");
    points.reserve(static_cast<std::size_t>(element.count));
    for (long i = 0; i < element.count; ++i) {
      next_line("reading vertices");
      const auto tokens = split_tokens(line);
      if (tokens.size() < element.properties.size())
        throw parse_error(path, line_no, "short vertex row");
      Eigen::Vector3d p;
      const int slots[3] = {element.x, element.y, element.z};
      for (int c = 0; c < 3; ++c)
        if (!parse_double_token(tokens[static_cast<std::size_t>(slots[c])],
                                p[c]))
          throw parse_error(path, line_no, "non-numeric vertex coordinate");
      points.push_back(p);
    }
  }
  if (points.empty())
    throw std::domain_error(path + ": file contains zero points");
  return PointCloud(std::move(points));
}

}  // namespace detail

inline PointCloud parse_point_file(const std::filesystem::path& path,
                                   PointFileFormat format) {
  std::ifstream in(path);
  if (!in) throw parse_error(path.string(), "cannot open file");
  return format == PointFileFormat::xyz
             ? detail::parse_xyz(in, path.string())
             : detail::parse_ply(in, path.string());
}

inline PointCloud parse_point_file(const std::filesystem::path& path) {
  return parse_point_file(path, format_from_path(path));
}

/// Writes with fixed 9-decimal precision: deterministic bytes and
/// round-trips within 1e-6 per coordinate.
inline void write_point_file(const PointCloud& cloud,
                             const std::filesystem::path& path,
                             PointFileFormat format) {
  cloud.validate();
  if (path.empty()) throw std::domain_error("write_point_file: empty path");
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_point_file: cannot open " + path.string());

  char buf[96];
  if (format == PointFileFormat::ply_ascii) {
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty double x\nproperty double y\nproperty double z\n"
           "end_header\n";
  }
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.9f %.9f %.9f\n", p.x(), p.y(), p.z());
    out << buf;
  }
  if (!out)
    throw std::runtime_error("write_point_file: write failed for " +
                             path.string());
}

inline void write_point_file(const PointCloud& cloud,
                             const std::filesystem::path& path) {
  write_point_file(cloud, path, format_from_path(path));
}

// ---------------------------------------------------------------------------
// Transform JSON
// ---------------------------------------------------------------------------

/// Serialized registration output: rotation (row-major), translation,
/// scale, and run metadata.
struct TransformRecord {
  RigidTransform transform;
  std::string algorithm;
  int iterations = 0;
  double final_displacement_norm = 0.0;
  nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();
};

inline nlohmann::ordered_json to_json(const RigidTransform& t) {
  nlohmann::ordered_json j;
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      rot[static_cast<std::size_t>(3 * r + c)] = t.rotation(r, c);
  j["rotation"] = rot;
  j["translation"] = {t.translation.x(), t.translation.y(), t.translation.z()};
  j["scale"] = t.scale;
  return j;
}

inline RigidTransform transform_from_json(const nlohmann::json& j) {
  RigidTransform t;
  const auto& rot = j.at("rotation");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      t.rotation(r, c) = rot.at(static_cast<std::size_t>(3 * r + c));
  const auto& trans = j.at("translation");
  for (int c = 0; c < 3; ++c) t.translation[c] = trans.at(static_cast<std::size_t>(c));
  t.scale = j.at("scale");
  return t;
}

inline nlohmann::ordered_json to_json(const TransformRecord& record) {
  if (!is_rotation(record.transform.rotation, 1e-6))
    throw degenerate_error(
        "transform record: rotation block is not orthonormal");
  nlohmann::ordered_json j = to_json(record.transform);
  j["algorithm"] = record.algorithm;
  j["iterations"] = record.iterations;
  j["final_displacement_norm"] = record.final_displacement_norm;
  j["config"] = record.config_echo;
  return j;
}

// ---------------------------------------------------------------------------
// Trace CSV
// ---------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "iteration,G,displacement_norm,rotation_delta_deg,scale,rmse\n";
  char buf[192];
  for (const auto& rec : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  rec.iteration, rec.g, rec.displacement_norm,
                  rec.rotation_delta_deg, rec.scale, rec.rmse);
    os << buf;
  }
}

}  // namespace scga
