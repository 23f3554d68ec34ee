#include "laser_tools/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"
#include "laser_tools/errors.hpp"

namespace laser_tools::io {

using nlohmann::json;

namespace {

bool is_space(char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// Any finite or non-finite double spelled out completely; the caller decides what is allowed.
std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

std::optional<double> to_finite(std::string_view s) {
  const auto v = to_double(s);
  if (!v || !std::isfinite(*v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> to_size(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string located(std::string_view context, std::size_t line) {
  return std::string(context) + ":" + std::to_string(line);
}

json parse_json(std::string_view text, std::string_view context) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string(context) + ": " + e.what());
  }
}

double number_field(const json& obj, const char* key, std::string_view context) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string(context) + ": missing key '" + key + "'");
  if (!it->is_number()) throw ParseError(std::string(context) + ": key '" + key + "' must be a number");
  return it->get<double>();
}

FrameId frame_field(const json& obj, std::string_view context) {
  const auto it = obj.find("frame");
  if (it == obj.end()) throw ParseError(std::string(context) + ": missing key 'frame'");
  if (!it->is_string()) throw ParseError(std::string(context) + ": key 'frame' must be a string");
  try {
    return FrameId(it->get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(context) + ": key 'frame': " + e.what());
  }
}

const std::set<std::string, std::less<>> kScanKeys{"frame",     "angle_min", "angle_max", "angle_increment",
                                                    "range_min", "range_max", "ranges"};

ScanRecord scan_from_json(const json& doc, std::string_view context, bool allow_source) {
  if (!doc.is_object()) throw ParseError(std::string(context) + ": scan must be a JSON object");
  std::optional<std::string> source;
  for (const auto& [key, value] : doc.items()) {
    if (kScanKeys.contains(key)) continue;
    if (allow_source && key == "source") {
      if (!value.is_string()) throw ParseError(std::string(context) + ": key 'source' must be a string");
      source = value.get<std::string>();
      continue;
    }
    throw ParseError(std::string(context) + ": unknown key '" + key + "'");
  }
  FrameId frame = frame_field(doc, context);
  const ScanGeometry geometry{number_field(doc, "angle_min", context), number_field(doc, "angle_max", context),
                              number_field(doc, "angle_increment", context),
                              number_field(doc, "range_min", context), number_field(doc, "range_max", context)};
  const auto it = doc.find("ranges");
  if (it == doc.end()) throw ParseError(std::string(context) + ": missing key 'ranges'");
  if (!it->is_array()) throw ParseError(std::string(context) + ": key 'ranges' must be an array");
  std::vector<double> ranges;
  ranges.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& r = (*it)[i];
    if (r.is_number()) {
      ranges.push_back(r.get<double>());
    } else if (r.is_string() && r.get<std::string>() == "inf") {
      ranges.push_back(kNoReturn);
    } else {
      throw ParseError(std::string(context) + ": ranges[" + std::to_string(i) +
                       "] must be a number or \"inf\"");
    }
  }
  try {
    geometry.validate();
    const std::size_t expected = geometry.beam_count();
    if (ranges.size() != expected) {
      throw ParseError(std::string(context) + ": key 'ranges' has " + std::to_string(ranges.size()) +
                       " entries, expected " + std::to_string(expected) +
                       " = floor((angle_max - angle_min) / angle_increment) + 1");
    }
    return {LaserScan(std::move(frame), geometry, std::move(ranges)), std::move(source)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(context) + ": " + e.what());
  }
}

std::string json_string(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return std::move(ss).str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error while writing '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

// ---- scans -----------------------------------------------------------------------------------

std::string format_scan(const LaserScan& scan) {
  std::string out;
  out.reserve(64 + scan.size() * 24);
  out += "{\"frame\":" + json_string(scan.frame().str());
  out += ",\"angle_min\":" + format_double(scan.angle_min());
  out += ",\"angle_max\":" + format_double(scan.angle_max());
  out += ",\"angle_increment\":" + format_double(scan.angle_increment());
  out += ",\"range_min\":" + format_double(scan.range_min());
  out += ",\"range_max\":" + format_double(scan.range_max());
  out += ",\"ranges\":[";
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (i) out += ',';
    const double r = scan.ranges()[i];
    out += std::isinf(r) ? std::string("\"inf\"") : format_double(r);
  }
  out += "]}";
  return out;
}

LaserScan parse_scan(std::string_view text, std::string_view context) {
  return scan_from_json(parse_json(text, context), context, false).scan;
}

ScanRecord parse_scan_record(std::string_view text, std::string_view context) {
  return scan_from_json(parse_json(text, context), context, true);
}

LaserScan read_scan(const std::filesystem::path& path) { return parse_scan(read_text(path), path.string()); }

void write_scan(const std::filesystem::path& path, const LaserScan& scan) {
  write_text_atomic(path, format_scan(scan) + "\n");
}

std::vector<LaserScan> read_scan_records(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto all = lines(text);
  std::vector<LaserScan> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (trim(all[i]).empty()) continue;
    out.push_back(parse_scan(all[i], located(path.string(), i + 1)));
  }
  return out;
}

void write_scan_records(const std::filesystem::path& path, std::span<const LaserScan> scans) {
  std::string text;
  for (const LaserScan& s : scans) text += format_scan(s) + "\n";
  write_text_atomic(path, text);
}

// ---- clouds ----------------------------------------------------------------------------------

std::string format_cloud_pcd(const PointCloud3& cloud) {
  const std::string n = std::to_string(cloud.size());
  std::string out = "# .PCD v0.7 - Point Cloud Data file format\n# frame: " + cloud.frame().str() +
                    "\nVERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\nWIDTH " + n +
                    "\nHEIGHT 1\nPOINTS " + n + "\nDATA ascii\n";
  for (const Vec3& p : cloud.points()) {
    out += format_double(p.x) + ' ' + format_double(p.y) + ' ' + format_double(p.z) + '\n';
  }
  return out;
}

PointCloud3 parse_cloud_pcd(std::string_view text, std::string_view context) {
  const auto all = lines(text);
  std::optional<std::string> frame;
  std::optional<std::size_t> width;
  std::optional<std::size_t> points_declared;
  bool have_fields = false;
  bool have_data = false;
  std::size_t line_no = 0;

  const auto fail = [&](const std::string& what) -> ParseError {
    return ParseError(located(context, line_no) + ": " + what);
  };
  const auto expect_all = [&](const std::vector<std::string_view>& tok, std::initializer_list<std::string_view> ok,
                              const char* what) {
    if (tok.size() != 4) throw fail(std::string(what) + " must list three values");
    for (std::size_t i = 1; i < 4; ++i) {
      if (std::find(ok.begin(), ok.end(), tok[i]) == ok.end()) {
        throw fail(std::string("unsupported ") + what + " '" + std::string(tok[i]) + "'");
      }
    }
  };

  std::size_t i = 0;
  for (; i < all.size() && !have_data; ++i) {
    line_no = i + 1;
    const std::string_view line = trim(all[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kFrameTag = "frame:";
      const std::string_view body = trim(line.substr(1));
      if (body.starts_with(kFrameTag)) frame = std::string(trim(body.substr(kFrameTag.size())));
      continue;
    }
    const auto tok = tokens(line);
    const std::string_view key = tok.front();
    if (key == "VERSION") {
      if (tok.size() != 2) throw fail("VERSION takes one value");
    } else if (key == "FIELDS") {
      if (tok.size() != 4 || tok[1] != "x" || tok[2] != "y" || tok[3] != "z") {
        throw fail("only FIELDS x y z is supported");
      }
      have_fields = true;
    } else if (key == "SIZE") {
      expect_all(tok, {"4", "8"}, "SIZE");
    } else if (key == "TYPE") {
      expect_all(tok, {"F"}, "TYPE");
    } else if (key == "COUNT") {
      expect_all(tok, {"1"}, "COUNT");
    } else if (key == "WIDTH") {
      if (tok.size() != 2 || !(width = to_size(tok[1]))) throw fail("WIDTH needs a non-negative integer");
    } else if (key == "HEIGHT") {
      if (tok.size() != 2 || tok[1] != "1") throw fail("only HEIGHT 1 (unorganized clouds) is supported");
    } else if (key == "VIEWPOINT") {
      if (tok.size() != 8) throw fail("VIEWPOINT takes seven values");
    } else if (key == "POINTS") {
      if (tok.size() != 2 || !(points_declared = to_size(tok[1]))) {
        throw fail("POINTS needs a non-negative integer");
      }
    } else if (key == "DATA") {
      if (tok.size() != 2) throw fail("DATA takes one value");
      if (tok[1] != "ascii") throw fail("unsupported PCD data format '" + std::string(tok[1]) + "', only ascii");
      have_data = true;
    } else {
      throw fail("unknown PCD header entry '" + std::string(key) + "'");
    }
  }

  line_no = i;
  if (!have_data) throw fail("missing DATA header line");
  if (!have_fields) throw fail("missing FIELDS header line");
  if (!points_declared) throw fail("missing POINTS header line");
  if (!width) throw fail("missing WIDTH header line");
  if (*width != *points_declared) {
    throw fail("WIDTH " + std::to_string(*width) + " does not match POINTS " + std::to_string(*points_declared));
  }
  if (!frame || frame->empty()) throw fail("missing '# frame: <name>' comment");

  std::vector<Vec3> pts;
  for (; i < all.size(); ++i) {
    line_no = i + 1;
    const std::string_view line = trim(all[i]);
    if (line.empty()) continue;
    const std::size_t index = pts.size();
    if (index >= *points_declared) {
      throw fail("more data rows than the declared POINTS " + std::to_string(*points_declared));
    }
    const auto tok = tokens(line);
    if (tok.size() != 3) throw fail("point " + std::to_string(index) + " must have three coordinates");
    Vec3 p;
    double* dst[3] = {&p.x, &p.y, &p.z};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto v = to_double(tok[k]);
      if (!v) throw fail("point " + std::to_string(index) + " has a malformed coordinate");
      if (!std::isfinite(*v)) throw fail("point " + std::to_string(index) + " is not finite");
      *dst[k] = *v;
    }
    pts.push_back(p);
  }
  if (pts.size() != *points_declared) {
    throw fail("header declares POINTS " + std::to_string(*points_declared) + " but found " +
               std::to_string(pts.size()) + " data rows");
  }
  try {
    return PointCloud3(FrameId(*frame), std::move(pts));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string(context) + ": " + e.what());
  }
}

PointCloud3 read_cloud(const std::filesystem::path& path) { return parse_cloud_pcd(read_text(path), path.string()); }

void write_cloud(const std::filesystem::path& path, const PointCloud3& cloud) {
  write_text_atomic(path, format_cloud_pcd(cloud));
}

std::string format_cloud_json(const PointCloud3& cloud) {
  std::string out = "{\"frame\":" + json_string(cloud.frame().str()) + ",\"points\":[";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points()[i];
    if (i) out += ',';
    out += '[' + format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.z) + ']';
  }
  out += "]}";
  return out;
}

PointCloud3 parse_cloud_json(std::string_view text, std::string_view context) {
  const json doc = parse_json(text, context);
  if (!doc.is_object()) throw ParseError(std::string(context) + ": cloud must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "frame" && key != "points") throw ParseError(std::string(context) + ": unknown key '" + key + "'");
  }
  FrameId frame = frame_field(doc, context);
  const auto it = doc.find("points");
  if (it == doc.end() || !it->is_array()) {
    throw ParseError(std::string(context) + ": key 'points' must be an array");
  }
  std::vector<Vec3> pts;
  pts.reserve(it->size());
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& row = (*it)[i];
    if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number()) {
      throw ParseError(std::string(context) + ": points[" + std::to_string(i) + "] must be [x, y, z]");
    }
    pts.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
  }
  return PointCloud3(std::move(frame), std::move(pts));
}

// ---- config ----------------------------------------------------------------------------------

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};
using Section = std::map<std::string, Entry, std::less<>>;

const std::set<std::string, std::less<>> kGeometryKeys{"angle_min", "angle_max",  "angle_increment", "range_min",
                                                       "range_max", "height_min", "height_max"};
const std::set<std::string, std::less<>> kMergeKeys{"destination_frame", "inputs", "scan_output", "cloud_output"};
const std::set<std::string, std::less<>> kVirtualizeKeys{"cloud_input", "base_frame", "virtual_frames",
                                                         "combined_output", "scan_output"};

// Everything from a '#' that starts a token to the end of the line.
std::string_view strip_comment(std::string_view line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || is_space(line[i - 1]))) return line.substr(0, i);
  }
  return line;
}

class SectionReader {
 public:
  SectionReader(const Section& section, std::string name, std::string_view context)
      : section_(section), name_(std::move(name)), context_(context) {}

  ConfigError error(const std::string& key, const std::string& what) const {
    const auto it = section_.find(key);
    std::string where = name_ + "." + key;
    if (it != section_.end()) where += " (" + located(context_, it->second.line) + ")";
    return ConfigError(where + ": " + what);
  }

  const std::string* raw(const std::string& key) const {
    const auto it = section_.find(key);
    return it == section_.end() ? nullptr : &it->second.value;
  }

  std::string required(const std::string& key) const {
    const std::string* v = raw(key);
    if (!v || v->empty()) throw ConfigError(name_ + "." + key + ": missing required key");
    return *v;
  }

  FrameId frame(const std::string& key) const {
    try {
      return FrameId(required(key));
    } catch (const std::invalid_argument& e) {
      throw error(key, e.what());
    }
  }

  std::optional<double> number(const std::string& key) const {
    const std::string* v = raw(key);
    if (!v) return std::nullopt;
    const auto d = to_finite(*v);
    if (!d) throw error(key, "expected a finite number, got '" + *v + "'");
    return d;
  }

  GeometrySpec geometry() const {
    return {number("angle_min"), number("angle_max"), number("angle_increment"), number("range_min"),
            number("range_max")};
  }

  std::optional<HeightBand> height_band() const {
    const auto lo = number("height_min");
    const auto hi = number("height_max");
    if (lo.has_value() != hi.has_value()) throw error(lo ? "height_min" : "height_max", "needs its counterpart");
    if (!lo) return std::nullopt;
    if (!(*lo <= *hi)) throw error("height_min", "must not exceed height_max");
    return HeightBand{*lo, *hi};
  }

 private:
  const Section& section_;
  std::string name_;
  std::string_view context_;
};

TransformEntry parse_transform_line(const std::vector<std::string_view>& tok, const std::string& where) {
  if (tok.size() != 8 && tok.size() != 9) {
    throw ConfigError(where + ": transform needs 'parent child x y z yaw pitch roll' (optionally a trailing period)");
  }
  // static_transform_publisher order puts the six numbers first.
  const bool numbers_first = to_double(tok[0]).has_value();
  const std::size_t num0 = numbers_first ? 0 : 2;
  const std::size_t names0 = numbers_first ? 6 : 0;
  double v[6];
  for (std::size_t k = 0; k < 6; ++k) {
    const auto d = to_finite(tok[num0 + k]);
    if (!d) throw ConfigError(where + ": '" + std::string(tok[num0 + k]) + "' is not a finite number");
    v[k] = *d;
  }
  if (tok.size() == 9 && !to_finite(tok[8])) {
    throw ConfigError(where + ": trailing period '" + std::string(tok[8]) + "' is not a number");
  }
  try {
    return {FrameId(std::string(tok[names0])), FrameId(std::string(tok[names0 + 1])), {v[0], v[1], v[2]}, v[3], v[4],
            v[5]};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto t : tokens(value)) out.emplace_back(t);
  return out;
}

}  // namespace

Config parse_config(std::string_view text, std::string_view context) {
  Config cfg;
  enum class Current { kNone, kTransforms, kMerge, kVirtualize };
  Current current = Current::kNone;
  std::set<std::string, std::less<>> seen;
  Section merge;
  Section virtualize;

  const auto all = lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string where = located(context, i + 1);
    const std::string_view line = trim(strip_comment(all[i]));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name == "transforms") {
        current = Current::kTransforms;
      } else if (name == "merge") {
        current = Current::kMerge;
      } else if (name == "virtualize") {
        current = Current::kVirtualize;
      } else {
        throw ConfigError(where + ": unknown section [" + name + "]");
      }
      if (!seen.insert(name).second) throw ConfigError(where + ": duplicate section [" + name + "]");
      continue;
    }

    switch (current) {
      case Current::kNone:
        throw ConfigError(where + ": content before the first section header");
      case Current::kTransforms: {
        TransformEntry e = parse_transform_line(tokens(line), where);
        try {
          cfg.tree.add_static_transform(e.parent, e.child, e.xyz, {e.yaw, e.pitch, e.roll});
        } catch (const std::invalid_argument& err) {
          throw ConfigError(where + ": " + err.what());
        }
        cfg.transforms.push_back(std::move(e));
        break;
      }
      case Current::kMerge:
      case Current::kVirtualize: {
        const bool is_merge = current == Current::kMerge;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const std::string path = std::string(is_merge ? "merge." : "virtualize.") + key;
        const auto& keys = is_merge ? kMergeKeys : kVirtualizeKeys;
        if (!keys.contains(key) && !kGeometryKeys.contains(key)) {
          throw ConfigError(where + ": unknown key '" + path + "'");
        }
        Section& section = is_merge ? merge : virtualize;
        if (!section.emplace(key, Entry{value, i + 1}).second) {
          throw ConfigError(where + ": duplicate key '" + path + "'");
        }
        break;
      }
    }
  }

  if (seen.contains("merge")) {
    const SectionReader r(merge, "merge", context);
    MergeSection m;
    m.config.destination_frame = r.frame("destination_frame");
    m.config.inputs = split_list(r.required("inputs"));
    m.config.output_geometry = r.geometry();
    if (m.config.output_geometry.angle_min.has_value() != m.config.output_geometry.angle_max.has_value()) {
      throw r.error(m.config.output_geometry.angle_min ? "angle_min" : "angle_max",
                    "angle_min and angle_max must be given together");
    }
    m.config.height_band = r.height_band();
    if (const auto* v = r.raw("scan_output")) m.scan_output = *v;
    if (const auto* v = r.raw("cloud_output")) m.cloud_output = *v;
    m.config.emit_cloud = !m.cloud_output.empty();
    cfg.merge = std::move(m);
  }

  if (seen.contains("virtualize")) {
    const SectionReader r(virtualize, "virtualize", context);
    VirtualizeSection v;
    v.config.base_frame = r.frame("base_frame");
    for (const std::string& name : split_list(r.required("virtual_frames"))) {
      try {
        v.config.virtual_frames.emplace_back(name);
      } catch (const std::invalid_argument& e) {
        throw r.error("virtual_frames", e.what());
      }
    }
    if (const auto* c = r.raw("combined_output")) {
      if (*c == "true") {
        v.config.combined_output = true;
      } else if (*c != "false") {
        throw r.error("combined_output", "expected true or false, got '" + *c + "'");
      }
    }
    v.geometry = r.geometry();
    const ScanGeometry fallback = default_virtual_geometry();
    try {
      v.config.output_geometry =
          v.geometry.resolve(fallback.angle_increment, fallback.range_min, fallback.range_max);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("virtualize: ") + e.what());
    }
    v.config.height_band = r.height_band();
    try {
      v.config.validate();
    } catch (const std::invalid_argument& e) {
      throw r.error("virtual_frames", e.what());
    }
    if (const auto* c = r.raw("cloud_input")) v.cloud_input = *c;
    if (const auto* c = r.raw("scan_output")) v.scan_output = *c;
    cfg.virtualize = std::move(v);
  }
  return cfg;
}

Config read_config(const std::filesystem::path& path) { return parse_config(read_text(path), path.string()); }

namespace {

void format_geometry(std::string& out, const GeometrySpec& g, const std::optional<HeightBand>& band) {
  const auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) out += std::string(key) + " = " + format_double(*v) + "\n";
  };
  put("angle_min", g.angle_min);
  put("angle_max", g.angle_max);
  put("angle_increment", g.angle_increment);
  put("range_min", g.range_min);
  put("range_max", g.range_max);
  if (band) {
    put("height_min", band->z_min);
    put("height_max", band->z_max);
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : " ") + s;
  return out;
}

}  // namespace

std::string format_config(const Config& config) {
  std::string out = "[transforms]\n";
  for (const TransformEntry& e : config.transforms) {
    out += e.parent.str() + " " + e.child.str() + " " + format_double(e.xyz.x) + " " + format_double(e.xyz.y) + " " +
           format_double(e.xyz.z) + " " + format_double(e.yaw) + " " + format_double(e.pitch) + " " +
           format_double(e.roll) + "\n";
  }
  if (config.merge) {
    const MergeSection& m = *config.merge;
    out += "\n[merge]\ndestination_frame = " + m.config.destination_frame.str() + "\n";
    out += "inputs = " + join(m.config.inputs) + "\n";
    if (!m.scan_output.empty()) out += "scan_output = " + m.scan_output + "\n";
    if (!m.cloud_output.empty()) out += "cloud_output = " + m.cloud_output + "\n";
    format_geometry(out, m.config.output_geometry, m.config.height_band);
  }
  if (config.virtualize) {
    const VirtualizeSection& v = *config.virtualize;
    out += "\n[virtualize]\nbase_frame = " + v.config.base_frame.str() + "\n";
    std::vector<std::string> names;
    for (const FrameId& f : v.config.virtual_frames) names.push_back(f.str());
    out += "virtual_frames = " + join(names) + "\n";
    out += std::string("combined_output = ") + (v.config.combined_output ? "true" : "false") + "\n";
    if (!v.cloud_input.empty()) out += "cloud_input = " + v.cloud_input + "\n";
    if (!v.scan_output.empty()) out += "scan_output = " + v.scan_output + "\n";
    format_geometry(out, v.geometry, v.config.height_band);
  }
  return out;
}

// ---- scenes ----------------------------------------------------------------------------------

SceneFile parse_scene(std::string_view text, std::string_view context) {
  SceneFile out;
  ScanGeometry geometry = default_virtual_geometry();
  const auto all = lines(text);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string where = located(context, i + 1);
    const auto tok = tokens(strip_comment(all[i]));
    if (tok.empty()) continue;
    const auto numbers = [&](std::size_t from, std::size_t count) {
      std::vector<double> v;
      for (std::size_t k = from; k < from + count; ++k) {
        const auto d = to_finite(tok[k]);
        if (!d) throw ParseError(where + ": '" + std::string(tok[k]) + "' is not a finite number");
        v.push_back(*d);
      }
      return v;
    };
    try {
      if (tok[0] == "wall") {
        if (tok.size() != 7) throw ParseError(where + ": wall needs x0 y0 x1 y1 z_lo z_hi");
        const auto v = numbers(1, 6);
        out.scene.add(Wall{{v[0], v[1]}, {v[2], v[3]}, v[4], v[5]});
      } else if (tok[0] == "geometry") {
        if (tok.size() != 6) {
          throw ParseError(where + ": geometry needs angle_min angle_max angle_increment range_min range_max");
        }
        const auto v = numbers(1, 5);
        ScanGeometry g{v[0], v[1], v[2], v[3], v[4]};
        g.validate();
        geometry = g;
      } else if (tok[0] == "scan" || tok[0] == "cloud") {
        const bool cloud = tok[0] == "cloud";
        if (tok.size() < 8 || (!cloud && tok.size() != 8) || (cloud && tok.size() < 9)) {
          throw ParseError(where + ": " + std::string(tok[0]) + " needs <frame> x y z yaw pitch roll" +
                           (cloud ? " elevation..." : ""));
        }
        const auto v = numbers(2, 6);
        SensorSpec s{FrameId(std::string(tok[1])), RigidTransform::from_xyz_ypr({v[0], v[1], v[2]}, v[3], v[4], v[5]),
                     geometry, cloud ? numbers(8, tok.size() - 8) : std::vector<double>{}, cloud};
        out.sensors.push_back(std::move(s));
      } else {
        throw ParseError(where + ": unknown directive '" + std::string(tok[0]) + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

SceneFile read_scene(const std::filesystem::path& path) { return parse_scene(read_text(path), path.string()); }

}  // namespace laser_tools::io
