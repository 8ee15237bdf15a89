#include "seg3d/pointcloud.hpp"

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace seg3d {

namespace {

constexpr std::string_view kProperties[] = {
    "property float x",     "property float y",     "property float z",
    "property uchar red",   "property uchar green", "property uchar blue",
};

[[noreturn]] void format_fail(const std::string& what) {
  throw Error(ErrorCode::FormatError, "PLY: " + what);
}

void append_float(std::string& out, float v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

void append_uint(std::string& out, unsigned v) {
  char buf[8];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Splits text into lines lazily.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    const auto end = nl == std::string_view::npos ? text_.size() : nl;
    line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
bool parse_token(std::string_view& s, T& value) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{}) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return s.empty() || s.front() == ' ' || s.front() == '\t';
}

}  // namespace

LengthUnit parse_length_unit(std::string_view s) {
  if (s == "mm") return LengthUnit::Millimeters;
  if (s == "m") return LengthUnit::Meters;
  throw Error(ErrorCode::InvalidArgument, "unknown unit '" + std::string(s) + "'");
}

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Axis parse_axis(std::string_view s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw Error(ErrorCode::InvalidArgument, "unknown axis '" + std::string(s) + "'");
}

std::string ply_to_string(const PointCloud& pc, LengthUnit units) {
  if (pc.points.size() != pc.colors.size()) {
    throw Error(ErrorCode::InvalidArgument, "point and color counts differ");
  }
  const double scale = units == LengthUnit::Meters ? 1e-3 : 1.0;
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(pc.size()) + "\n";
  for (auto p : kProperties) {
    out += p;
    out += '\n';
  }
  out += "end_header\n";
  out.reserve(out.size() + pc.size() * 40);
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Point3& p = pc.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coordinate at point " + std::to_string(i));
    }
    append_float(out, static_cast<float>(p.x * scale));
    out += ' ';
    append_float(out, static_cast<float>(p.y * scale));
    out += ' ';
    append_float(out, static_cast<float>(p.z * scale));
    for (std::uint8_t c : {pc.colors[i].r, pc.colors[i].g, pc.colors[i].b}) {
      out += ' ';
      append_uint(out, c);
    }
    out += '\n';
  }
  return out;
}

void export_ply(const PointCloud& pc, const std::filesystem::path& path, LengthUnit units) {
  write_file_atomic(path, ply_to_string(pc, units));
}

PointCloud parse_ply(std::string_view text) {
  LineReader lines(text);
  std::string_view line;
  auto next_header = [&]() {
    do {
      if (!lines.next(line)) format_fail("truncated header");
      line = trim(line);
    } while (line.starts_with("comment") || line.starts_with("obj_info"));
    return line;
  };

  if (next_header() != "ply") format_fail("missing 'ply' magic");
  const auto fmt = next_header();
  if (fmt.starts_with("format binary")) format_fail("binary encodings are not supported");
  if (fmt != "format ascii 1.0") format_fail("unsupported format line '" + std::string(fmt) + "'");

  auto elem = next_header();
  if (!elem.starts_with("element vertex ")) format_fail("expected 'element vertex N'");
  elem.remove_prefix(std::string_view("element vertex ").size());
  std::size_t count = 0;
  if (!parse_token(elem, count) || !trim(elem).empty()) format_fail("bad vertex count");

  for (auto expected : kProperties) {
    const auto prop = next_header();
    if (prop != expected) {
      format_fail("expected '" + std::string(expected) + "', found '" + std::string(prop) + "'");
    }
  }
  if (next_header() != "end_header") format_fail("unexpected header content before end_header");

  PointCloud pc;
  pc.reserve(count);
  while (lines.next(line)) {
    auto rest = trim(line);
    if (rest.empty()) continue;
    if (pc.size() == count) format_fail("more vertex lines than the declared " + std::to_string(count));
    float xyz[3];
    unsigned rgb[3];
    bool ok = true;
    for (float& v : xyz) ok = ok && parse_token(rest, v);
    for (unsigned& v : rgb) ok = ok && parse_token(rest, v) && v <= 255;
    if (!ok || !trim(rest).empty()) format_fail("malformed vertex on line " + std::to_string(lines.line_no()));
    pc.push_back({xyz[0], xyz[1], xyz[2]},
                 Rgb{static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                     static_cast<std::uint8_t>(rgb[2])});
  }
  if (pc.size() != count) {
    format_fail("header declares " + std::to_string(count) + " vertices, found " + std::to_string(pc.size()));
  }
  return pc;
}

PointCloud import_ply(const std::filesystem::path& path) {
  const std::string text = read_file_text(path);
  try {
    return parse_ply(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

ExtentReport measure_extent(const PointCloud& pc, Axis axis, double trim_fraction) {
  if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "trim fraction must lie in [0, 0.5)");
  }
  std::vector<double> coords;
  coords.reserve(pc.size());
  for (const auto& p : pc.points) {
    coords.push_back(axis == Axis::X ? p.x : axis == Axis::Y ? p.y : p.z);
  }
  const auto n = coords.size();
  const auto drop = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));
  if (n < 2 || n - 2 * drop < 2) {
    throw Error(ErrorCode::TooFewPoints, "need at least 2 points after trimming, have " +
                                             std::to_string(n < 2 * drop ? 0 : n - 2 * drop));
  }
  std::sort(coords.begin(), coords.end());
  ExtentReport r;
  r.axis = axis;
  r.trim_fraction = trim_fraction;
  r.point_count = n - 2 * drop;
  r.extent = coords[n - 1 - drop] - coords[drop];
  return r;
}

}  // namespace seg3d
