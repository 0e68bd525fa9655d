#include "rgbdg/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rgbdg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::io_failure, "write failed for " + path.string());
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// --- Netpbm ------------------------------------------------------------------

constexpr long kMaxSide = 1L << 16;

struct PnmHeader {
  long width = 0;
  long height = 0;
  long maxval = 0;
  std::size_t payload_offset = 0;
};

class PnmReader {
 public:
  PnmReader(const std::string& bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  PnmHeader header(const char* magic) {
    if (bytes_.size() < 2 || bytes_[0] != magic[0] || bytes_[1] != magic[1]) {
      fail("expected magic '" + std::string(magic) + "'", 0);
    }
    pos_ = 2;
    PnmHeader h;
    h.width = number("width");
    h.height = number("height");
    h.maxval = number("maxval");
    if (h.width < 1 || h.height < 1 || h.width > kMaxSide || h.height > kMaxSide) {
      fail("unsupported dimensions " + std::to_string(h.width) + "x" + std::to_string(h.height), pos_);
    }
    if (h.maxval < 1 || h.maxval > 65535) fail("maxval must lie in [1, 65535]", pos_);
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) fail("missing whitespace after maxval", pos_);
    h.payload_offset = pos_ + 1;
    return h;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    throw Error(ErrorCode::malformed_header, source_ + ": " + what + " at byte " + std::to_string(offset));
  }

  long number(const char* field) {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) fail(std::string(field) + " is too large", start);
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected ") + field, start);
    return value;
  }

  const std::string& bytes_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

std::vector<double> pnm_samples(const std::string& bytes, const PnmHeader& h, int channels, const std::string& source) {
  const std::size_t count = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) * channels;
  const std::size_t stride = h.maxval > 255 ? 2 : 1;
  const std::size_t need = count * stride;
  const std::size_t have = bytes.size() >= h.payload_offset ? bytes.size() - h.payload_offset : 0;
  if (have < need) {
    throw Error(ErrorCode::truncated_payload, source + ": expected " + std::to_string(need) + " payload bytes from byte " +
                                                  std::to_string(h.payload_offset) + ", found " + std::to_string(have));
  }
  std::vector<double> out(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.payload_offset);
  const double scale = 1.0 / static_cast<double>(h.maxval);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = stride == 2 ? (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
    if (v > static_cast<unsigned>(h.maxval)) {
      throw Error(ErrorCode::value_out_of_range, source + ": sample " + std::to_string(v) + " exceeds maxval at byte " +
                                                     std::to_string(h.payload_offset + i * stride));
    }
    out[i] = v * scale;
  }
  return out;
}

// --- CSV ----------------------------------------------------------------------

struct CsvLine {
  std::string_view text;
  std::size_t offset;
};

std::vector<CsvLine> split_lines(const std::string& text) {
  std::vector<CsvLine> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, start});
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && lines.back().text.find_first_not_of(" \t") == std::string_view::npos) lines.pop_back();
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

struct CsvRaster {
  Extent extent;
  std::vector<double> values;
};

CsvRaster parse_csv(const std::string& text, int channels, const std::string& source) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::malformed_header, source + ": empty file at byte 0");

  const CsvLine& head = lines.front();
  const auto comma = head.text.find(',');
  long dims[2] = {0, 0};
  bool ok = comma != std::string_view::npos;
  if (ok) {
    const std::string_view parts[2] = {trim(head.text.substr(0, comma)), trim(head.text.substr(comma + 1))};
    for (int i = 0; i < 2 && ok; ++i) {
      const auto r = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), dims[i]);
      ok = r.ec == std::errc() && r.ptr == parts[i].data() + parts[i].size();
    }
  }
  if (!ok) throw Error(ErrorCode::malformed_header, source + ": expected 'width,height' at byte 0");
  if (dims[0] < 1 || dims[1] < 1 || dims[0] > kMaxSide || dims[1] > kMaxSide) {
    throw Error(ErrorCode::malformed_header, source + ": unsupported dimensions at byte 0");
  }

  CsvRaster raster{Extent{static_cast<int>(dims[0]), static_cast<int>(dims[1])}, {}};
  const std::size_t per_row = static_cast<std::size_t>(dims[0]) * channels;
  raster.values.reserve(per_row * static_cast<std::size_t>(dims[1]));
  if (lines.size() - 1 < static_cast<std::size_t>(dims[1])) {
    throw Error(ErrorCode::truncated_payload, source + ": expected " + std::to_string(dims[1]) + " rows, found " +
                                                  std::to_string(lines.size() - 1) + " (end at byte " +
                                                  std::to_string(text.size()) + ")");
  }
  for (long row = 0; row < dims[1]; ++row) {
    const CsvLine& line = lines[static_cast<std::size_t>(row) + 1];
    std::size_t pos = 0;
    std::size_t count = 0;
    while (pos <= line.text.size()) {
      std::size_t end = line.text.find(',', pos);
      if (end == std::string_view::npos) end = line.text.size();
      const std::string_view tok = trim(line.text.substr(pos, end - pos));
      const std::size_t at = line.offset + pos;
      double v = 0.0;
      const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
        throw Error(ErrorCode::value_out_of_range, source + ": '" + std::string(tok) + "' is not a number at byte " +
                                                       std::to_string(at));
      }
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::value_out_of_range, source + ": value " + std::string(tok) +
                                                       " outside [0,1] at byte " + std::to_string(at));
      }
      raster.values.push_back(v);
      ++count;
      if (end == line.text.size()) break;
      pos = end + 1;
    }
    if (count != per_row) {
      throw Error(count < per_row ? ErrorCode::truncated_payload : ErrorCode::malformed_header,
                  source + ": row " + std::to_string(row) + " holds " + std::to_string(count) + " values, expected " +
                      std::to_string(per_row) + " (line at byte " + std::to_string(line.offset) + ")");
    }
  }
  return raster;
}

std::string format_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint8_t quantize8(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

ActivationHeatmap parse_ppm(const std::string& bytes, const std::string& source) {
  const PnmHeader h = PnmReader(bytes, source).header("P6");
  std::vector<double> s = pnm_samples(bytes, h, 3, source);
  std::vector<Rgb> pixels(s.size() / 3);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = Rgb{s[3 * i], s[3 * i + 1], s[3 * i + 2]};
  return ActivationHeatmap(Extent{static_cast<int>(h.width), static_cast<int>(h.height)}, std::move(pixels));
}

DepthMap parse_pgm(const std::string& bytes, const std::string& source) {
  const PnmHeader h = PnmReader(bytes, source).header("P5");
  return DepthMap(Extent{static_cast<int>(h.width), static_cast<int>(h.height)}, pnm_samples(bytes, h, 1, source));
}

ActivationHeatmap parse_heatmap_csv(const std::string& text, const std::string& source) {
  CsvRaster raster = parse_csv(text, 3, source);
  std::vector<Rgb> pixels(raster.values.size() / 3);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = Rgb{raster.values[3 * i], raster.values[3 * i + 1], raster.values[3 * i + 2]};
  }
  return ActivationHeatmap(raster.extent, std::move(pixels));
}

DepthMap parse_depth_csv(const std::string& text, const std::string& source) {
  CsvRaster raster = parse_csv(text, 1, source);
  return DepthMap(raster.extent, std::move(raster.values));
}

ActivationHeatmap read_heatmap(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ppm") return parse_ppm(read_file(path), path.string());
  if (ext == ".csv") return parse_heatmap_csv(read_file(path), path.string());
  throw Error(ErrorCode::malformed_header, path.string() + ": unknown heatmap extension '" + ext + "'");
}

DepthMap read_depth(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") return parse_pgm(read_file(path), path.string());
  if (ext == ".csv") return parse_depth_csv(read_file(path), path.string());
  throw Error(ErrorCode::malformed_header, path.string() + ": unknown depth extension '" + ext + "'");
}

void write_ppm(const Image8& image, const fs::path& path) {
  auto out = open_output(path, std::ios::binary);
  out << "P6\n" << image.extent.width << ' ' << image.extent.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
  finish_output(out, path);
}

Image8 read_ppm_image(const fs::path& path) {
  const std::string bytes = read_file(path);
  const PnmHeader h = PnmReader(bytes, path.string()).header("P6");
  if (h.maxval != 255) throw Error(ErrorCode::malformed_header, path.string() + ": expected maxval 255");
  Image8 img{Extent{static_cast<int>(h.width), static_cast<int>(h.height)}, {}};
  const std::size_t need = 3 * img.extent.size();
  if (bytes.size() < h.payload_offset + need) {
    throw Error(ErrorCode::truncated_payload, path.string() + ": payload shorter than " + std::to_string(need) +
                                                  " bytes from byte " + std::to_string(h.payload_offset));
  }
  img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset),
                 bytes.begin() + static_cast<std::ptrdiff_t>(h.payload_offset + need));
  return img;
}

void write_heatmap(const ActivationHeatmap& heatmap, const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".ppm") {
    Image8 img{heatmap.extent(), {}};
    img.rgb.reserve(3 * heatmap.extent().size());
    for (const Rgb& p : heatmap.pixels()) {
      img.rgb.push_back(quantize8(p.r));
      img.rgb.push_back(quantize8(p.g));
      img.rgb.push_back(quantize8(p.b));
    }
    write_ppm(img, path);
    return;
  }
  if (ext != ".csv") throw Error(ErrorCode::io_failure, path.string() + ": unknown heatmap extension '" + ext + "'");
  auto out = open_output(path);
  out << heatmap.width() << ',' << heatmap.height() << '\n';
  for (int y = 0; y < heatmap.height(); ++y) {
    for (int x = 0; x < heatmap.width(); ++x) {
      const Rgb& p = heatmap.at(x, y);
      out << (x ? "," : "") << format_sig9(p.r) << ',' << format_sig9(p.g) << ',' << format_sig9(p.b);
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_depth(const DepthMap& depth, const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") {
    auto out = open_output(path, std::ios::binary);
    out << "P5\n" << depth.width() << ' ' << depth.height() << "\n65535\n";
    std::string payload;
    payload.reserve(2 * depth.extent().size());
    for (double v : depth.values()) {
      const auto q = static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
      payload.push_back(static_cast<char>(q >> 8));
      payload.push_back(static_cast<char>(q & 0xFF));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    finish_output(out, path);
    return;
  }
  if (ext != ".csv") throw Error(ErrorCode::io_failure, path.string() + ": unknown depth extension '" + ext + "'");
  auto out = open_output(path);
  out << depth.width() << ',' << depth.height() << '\n';
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) out << (x ? "," : "") << format_sig9(depth.at(x, y));
    out << '\n';
  }
  finish_output(out, path);
}

// --- Manifest -----------------------------------------------------------------

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::schema_violation, field + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing");
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

long long require_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<long long>();
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

}  // namespace

fs::path DatasetManifest::resolve(const std::string& path) const {
  const fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* data_dir = std::getenv("RGBDG_DATA_DIR"); data_dir != nullptr && *data_dir != '\0') {
    return fs::path(data_dir) / p;
  }
  return base_dir / p;
}

const ManifestEntry* DatasetManifest::find(const std::string& scene_id) const {
  for (const ManifestEntry& e : entries) {
    if (e.scene_id == scene_id) return &e;
  }
  return nullptr;
}

DatasetManifest parse_manifest(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) schema_error("$", "expected an object");
  const json& entries = require(doc, "entries", "$");
  if (!entries.is_array()) schema_error("$.entries", "expected an array");

  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string path = "$.entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    if (!e.is_object()) schema_error(path, "expected an object");
    ManifestEntry entry;
    entry.scene_id = require_string(e, "scene_id", path);
    if (entry.scene_id.empty()) schema_error(path + ".scene_id", "must not be empty");
    entry.rgb_heatmap_path = require_string(e, "rgb_heatmap_path", path);
    entry.depth_heatmap_path = require_string(e, "depth_heatmap_path", path);
    entry.depth_map_path = require_string(e, "depth_map_path", path);
    entry.expression = require_string(e, "expression", path);

    const json& gt = require(e, "ground_truth", path);
    if (!gt.is_array() || gt.size() != 4) schema_error(path + ".ground_truth", "expected [x_min, y_min, x_max, y_max]");
    int c[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const long long v = require_integer(gt[k], path + ".ground_truth[" + std::to_string(k) + "]");
      if (v < 0 || v > kMaxSide) schema_error(path + ".ground_truth[" + std::to_string(k) + "]", "out of range");
      c[k] = static_cast<int>(v);
    }
    try {
      entry.ground_truth = BoundingBox(c[0], c[1], c[2], c[3]);
    } catch (const Error&) {
      schema_error(path + ".ground_truth", "corners are inverted");
    }

    const std::string category = require_string(e, "category", path);
    if (category != "easy" && category != "difficult") {
      schema_error(path + ".category", "expected 'easy' or 'difficult'");
    }
    entry.category = category_from_string(category);

    if (manifest.find(entry.scene_id) != nullptr) {
      throw Error(ErrorCode::duplicate_scene_id, path + ".scene_id: '" + entry.scene_id + "' appears twice");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::schema_violation, path.string() + ": not valid JSON");
  return parse_manifest(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  ordered_json entries = ordered_json::array();
  for (const ManifestEntry& e : manifest.entries) {
    const BoundingBox& b = e.ground_truth;
    entries.push_back(ordered_json{{"scene_id", e.scene_id},
                                   {"rgb_heatmap_path", e.rgb_heatmap_path},
                                   {"depth_heatmap_path", e.depth_heatmap_path},
                                   {"depth_map_path", e.depth_map_path},
                                   {"expression", e.expression},
                                   {"ground_truth", {b.x_min(), b.y_min(), b.x_max(), b.y_max()}},
                                   {"category", to_string(e.category)}});
  }
  auto out = open_output(path);
  out << ordered_json{{"entries", entries}}.dump(2) << '\n';
  finish_output(out, path);
}

Scene load_scene(const DatasetManifest& manifest, const ManifestEntry& entry) {
  Scene scene;
  scene.id = entry.scene_id;
  scene.expression = entry.expression;
  scene.ground_truth = entry.ground_truth;
  scene.category = entry.category;
  scene.rgb_heatmap = read_heatmap(manifest.resolve(entry.rgb_heatmap_path));
  scene.depth_heatmap = read_heatmap(manifest.resolve(entry.depth_heatmap_path));
  scene.depth_map = read_depth(manifest.resolve(entry.depth_map_path));
  return validate_scene(scene);
}

ManifestEntry write_scene(const Scene& scene, const fs::path& dir, const fs::path& relative_to) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string() + ": " + ec.message());
  const fs::path rgb = dir / "rgb_heatmap.ppm";
  const fs::path depth_h = dir / "depth_heatmap.ppm";
  const fs::path depth = dir / "depth_map.pgm";
  write_heatmap(scene.rgb_heatmap, rgb);
  write_heatmap(scene.depth_heatmap, depth_h);
  write_depth(scene.depth_map, depth);
  const auto rel = [&](const fs::path& p) { return fs::relative(p, relative_to).generic_string(); };
  return ManifestEntry{scene.id,         rel(rgb),           rel(depth_h),   rel(depth),
                       scene.expression, scene.ground_truth, scene.category};
}

// --- Proposals and reports ------------------------------------------------------

double round_sig9(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::strtod(format_sig9(value).c_str(), nullptr);
}

ordered_json proposal_to_json(const ProposalSet& set, const RegionProposal& p) {
  return ordered_json{{"scene_id", set.scene_id},
                      {"mode", to_string(set.mode)},
                      {"rank", p.rank},
                      {"box", {p.box.x_min(), p.box.y_min(), p.box.x_max(), p.box.y_max()}},
                      {"activation", round_sig9(p.activation)},
                      {"pixel_count", p.pixel_count}};
}

void write_proposals(const std::vector<ProposalSet>& sets, std::ostream& out) {
  for (const ProposalSet& set : sets) {
    for (const RegionProposal& p : set.proposals) out << proposal_to_json(set, p).dump() << '\n';
  }
}

void write_proposals(const std::vector<ProposalSet>& sets, const fs::path& path) {
  auto out = open_output(path);
  write_proposals(sets, static_cast<std::ostream&>(out));
  finish_output(out, path);
}

void write_proposals(const ProposalSet& set, const fs::path& path) { write_proposals(std::vector<ProposalSet>{set}, path); }

std::vector<ProposalSet> parse_proposals(std::istream& in, const std::string& source) {
  std::vector<ProposalSet> sets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string path = source + ":" + std::to_string(lineno);
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) schema_error(path, "expected a JSON object");
    const std::string scene_id = require_string(doc, "scene_id", path);
    const std::string mode_name = require_string(doc, "mode", path);
    if (mode_name != "rgbd" && mode_name != "rgb") schema_error(path + ".mode", "expected 'rgbd' or 'rgb'");
    const Mode mode = mode_from_string(mode_name);

    RegionProposal p;
    p.rank = static_cast<int>(require_integer(require(doc, "rank", path), path + ".rank"));
    if (p.rank < 1) schema_error(path + ".rank", "must be positive");
    const json& box = require(doc, "box", path);
    if (!box.is_array() || box.size() != 4) schema_error(path + ".box", "expected four integers");
    int c[4];
    for (std::size_t k = 0; k < 4; ++k) {
      c[k] = static_cast<int>(require_integer(box[k], path + ".box[" + std::to_string(k) + "]"));
    }
    try {
      p.box = BoundingBox(c[0], c[1], c[2], c[3]);
    } catch (const Error&) {
      schema_error(path + ".box", "corners are inverted");
    }
    p.activation = require_number(require(doc, "activation", path), path + ".activation");
    if (!(p.activation >= 0.0 && p.activation <= 1.0)) schema_error(path + ".activation", "outside [0,1]");
    p.pixel_count = require_integer(require(doc, "pixel_count", path), path + ".pixel_count");
    if (p.pixel_count < 1) schema_error(path + ".pixel_count", "must be positive");

    if (sets.empty() || sets.back().scene_id != scene_id || sets.back().mode != mode) {
      sets.push_back(ProposalSet{scene_id, mode, {}});
    }
    sets.back().proposals.push_back(p);
  }
  return sets;
}

std::vector<ProposalSet> read_proposals(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  return parse_proposals(in, path.string());
}

EvaluationReport summarize(std::vector<MatchReport> reports, const std::vector<Mode>& modes) {
  EvaluationReport report{modes, std::move(reports), {}};
  const std::pair<const char*, std::optional<Category>> splits[] = {
      {"whole", std::nullopt}, {"easy", Category::easy}, {"difficult", Category::difficult}};
  for (const auto& [name, filter] : splits) {
    TableSummary t{name, aggregate(report.reports, modes, filter), std::nullopt, {}};
    try {
      t.chi_squared = chi_squared(t.table);
    } catch (const Error& e) {
      t.chi_squared_error = e.what();
    }
    report.tables.push_back(std::move(t));
  }
  return report;
}

ordered_json report_to_json(const EvaluationReport& report) {
  ordered_json modes = ordered_json::array();
  for (Mode m : report.modes) modes.push_back(to_string(m));

  ordered_json matches = ordered_json::array();
  for (const MatchReport& r : report.reports) {
    ordered_json scores = ordered_json::array();
    for (double s : r.scores) scores.push_back(round_sig9(s));
    matches.push_back(ordered_json{{"scene_id", r.scene_id},
                                   {"category", to_string(r.category)},
                                   {"mode", to_string(r.mode)},
                                   {"matched_rank", to_string(r.matched_rank)},
                                   {"scores", scores}});
  }

  ordered_json tables = ordered_json::array();
  for (const TableSummary& t : report.tables) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < t.table.modes.size(); ++i) {
      const auto& c = t.table.counts[i];
      rows.push_back(ordered_json{{"mode", to_string(t.table.modes[i])},
                                  {"first", c[0]},
                                  {"second", c[1]},
                                  {"third", c[2]},
                                  {"none", c[3]},
                                  {"total", t.table.row_total(i)}});
    }
    ordered_json chi = nullptr;
    if (t.chi_squared) {
      chi = ordered_json{{"statistic", round_sig9(t.chi_squared->statistic)},
                         {"degrees_of_freedom", t.chi_squared->degrees_of_freedom}};
    } else {
      chi = ordered_json{{"error", t.chi_squared_error}};
    }
    tables.push_back(ordered_json{{"name", t.name}, {"rows", rows}, {"chi_squared", chi}});
  }
  return ordered_json{{"modes", modes}, {"matches", matches}, {"tables", tables}};
}

void write_report(const EvaluationReport& report, const fs::path& path) {
  auto out = open_output(path);
  out << report_to_json(report).dump(2) << '\n';
  finish_output(out, path);
}

// --- Synthetic scene specs ------------------------------------------------------

SynthSpec parse_synth_spec(const json& doc) {
  if (!doc.is_object()) schema_error("$", "expected an object");
  SynthSpec spec;
  if (doc.contains("id")) spec.id = require_string(doc, "id", "$");
  spec.width = static_cast<int>(require_integer(require(doc, "width", "$"), "$.width"));
  spec.height = static_cast<int>(require_integer(require(doc, "height", "$"), "$.height"));
  if (doc.contains("blobs")) {
    const json& blobs = doc["blobs"];
    if (!blobs.is_array()) schema_error("$.blobs", "expected an array");
    for (std::size_t i = 0; i < blobs.size(); ++i) {
      const std::string path = "$.blobs[" + std::to_string(i) + "]";
      const json& b = blobs[i];
      if (!b.is_object()) schema_error(path, "expected an object");
      const json& center = require(b, "center", path);
      if (!center.is_array() || center.size() != 2) schema_error(path + ".center", "expected [x, y]");
      Blob blob;
      blob.center_x = require_number(center[0], path + ".center[0]");
      blob.center_y = require_number(center[1], path + ".center[1]");
      blob.radius_sigma = require_number(require(b, "radius_sigma", path), path + ".radius_sigma");
      blob.peak = require_number(require(b, "peak", path), path + ".peak");
      blob.depth = require_number(require(b, "depth", path), path + ".depth");
      spec.blobs.push_back(blob);
    }
  }
  const auto index_list = [&](const char* key) {
    std::vector<int> out;
    if (!doc.contains(key)) return out;
    const json& arr = doc[key];
    const std::string path = std::string("$.") + key;
    if (!arr.is_array()) schema_error(path, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(static_cast<int>(require_integer(arr[i], path + "[" + std::to_string(i) + "]")));
    }
    return out;
  };
  spec.rgb_active_blobs = index_list("rgb_active_blobs");
  spec.depth_active_blobs = index_list("depth_active_blobs");
  if (doc.contains("target")) spec.target = static_cast<int>(require_integer(doc["target"], "$.target"));
  if (doc.contains("noise_amplitude")) spec.noise_amplitude = require_number(doc["noise_amplitude"], "$.noise_amplitude");
  if (doc.contains("seed")) {
    const long long seed = require_integer(doc["seed"], "$.seed");
    if (seed < 0) schema_error("$.seed", "must be non-negative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  if (doc.contains("expression")) spec.expression = require_string(doc, "expression", "$");
  if (doc.contains("category")) {
    const std::string c = require_string(doc, "category", "$");
    if (c != "easy" && c != "difficult") schema_error("$.category", "expected 'easy' or 'difficult'");
    spec.category = category_from_string(c);
  }
  spec.validate();
  return spec;
}

SynthSpec read_synth_spec(const fs::path& path) {
  const json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::schema_violation, path.string() + ": not valid JSON");
  return parse_synth_spec(doc);
}

}  // namespace rgbdg
