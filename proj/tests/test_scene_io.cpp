#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rgbdg/scene_io.hpp"

using namespace rgbdg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("rgbdg_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_failure;
}

nlohmann::json entry_json(const std::string& id) {
  return {{"scene_id", id},
          {"rgb_heatmap_path", id + "/rgb.ppm"},
          {"depth_heatmap_path", id + "/depth.ppm"},
          {"depth_map_path", id + "/depth.pgm"},
          {"expression", "the cup"},
          {"ground_truth", {1, 2, 3, 4}},
          {"category", "easy"}};
}

}  // namespace

TEST_CASE("P6 heatmap decoding") {
  const std::string bytes = std::string("P6\n2 1\n255\n") + std::string("\xff\x00\x00\x00\x00\xff", 6);
  const auto h = parse_ppm(bytes);
  REQUIRE(h.extent() == Extent{2, 1});
  CHECK(h.at(0, 0) == Rgb{1.0, 0.0, 0.0});
  CHECK(h.at(1, 0) == Rgb{0.0, 0.0, 1.0});
  const auto commented = parse_ppm(std::string("P6 # a comment\n2 1\n# another\n255\n") +
                                   std::string("\xff\x00\x00\x00\x00\xff", 6));
  CHECK(commented == h);
}

TEST_CASE("CSV heatmap decoding") {
  const auto h = parse_heatmap_csv("2,1\n1.0,0.0,0.0,0.0,0.0,1.0");
  CHECK(h.at(0, 0) == Rgb{1.0, 0.0, 0.0});
  CHECK(h.at(1, 0) == Rgb{0.0, 0.0, 1.0});
  CHECK(code_of([] { parse_heatmap_csv("2,1\n1.0,0.0,0.0,0.0,0.0"); }) == ErrorCode::truncated_payload);
  CHECK(code_of([] { parse_heatmap_csv("2,1\n1.5,0.0,0.0,0.0,0.0,1.0"); }) == ErrorCode::value_out_of_range);
  CHECK(code_of([] { parse_heatmap_csv("two,1\n"); }) == ErrorCode::malformed_header);
}

TEST_CASE("truncated and malformed netpbm payloads") {
  const std::string short_body = std::string("P6\n4 4\n255\n") + std::string(30, '\x10');
  CHECK(code_of([&] { parse_ppm(short_body); }) == ErrorCode::truncated_payload);
  CHECK(code_of([] { parse_ppm("P3\n1 1\n255\n0 0 0"); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { parse_ppm("P6\n0 1\n255\n"); }) == ErrorCode::malformed_header);
  CHECK(code_of([] { parse_pgm(std::string("P5\n1 1\n100\n") + "\x7f"); }) == ErrorCode::value_out_of_range);
}

TEST_CASE("PGM depth decoding") {
  const auto d8 = parse_pgm(std::string("P5\n1 1\n255\n") + "\x80");
  CHECK(d8.at(0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-15));
  const auto d16 = parse_pgm(std::string("P5\n2 1\n65535\n") + std::string("\xff\xff\x01\x00", 4));
  CHECK(d16.at(0, 0) == 1.0);
  CHECK(d16.at(1, 0) == doctest::Approx(256.0 / 65535.0).epsilon(1e-15));
  CHECK(code_of([] { parse_depth_csv("1,1\n1.5"); }) == ErrorCode::value_out_of_range);
  CHECK(parse_depth_csv("2,2\n0.1,0.2\n0.3,0.4\n").at(1, 1) == 0.4);
}

TEST_CASE("rasters round-trip through files") {
  TempDir tmp;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Rgb> px(12 * 7);
  for (auto& p : px) p = {u(rng), u(rng), u(rng)};
  const ActivationHeatmap h({12, 7}, px);
  write_heatmap(h, tmp.path / "h.csv");
  const auto back = read_heatmap(tmp.path / "h.csv");
  for (std::size_t i = 0; i < px.size(); ++i) {
    CHECK(std::abs(back.pixels()[i].r - px[i].r) < 1e-8);
  }
  write_heatmap(h, tmp.path / "h.ppm");
  const auto q = read_heatmap(tmp.path / "h.ppm");
  for (std::size_t i = 0; i < px.size(); ++i) CHECK(std::abs(q.pixels()[i].g - px[i].g) <= 0.5 / 255.0 + 1e-12);

  std::vector<double> dv(12 * 7);
  for (double& v : dv) v = u(rng);
  const DepthMap d({12, 7}, dv);
  write_depth(d, tmp.path / "d.pgm");
  const auto dq = read_depth(tmp.path / "d.pgm");
  for (std::size_t i = 0; i < dv.size(); ++i) CHECK(std::abs(dq.values()[i] - dv[i]) <= 0.5 / 65535.0 + 1e-12);
  CHECK(code_of([&] { read_heatmap(tmp.path / "missing.ppm"); }) == ErrorCode::io_failure);
}

TEST_CASE("manifest parsing") {
  const nlohmann::json ok{{"entries", {entry_json("s1"), entry_json("s2")}}};
  const auto m = parse_manifest(ok, "/data");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].ground_truth == BoundingBox(1, 2, 3, 4));
  CHECK(m.find("s2") != nullptr);
  CHECK(m.find("s3") == nullptr);

  const nlohmann::json dup{{"entries", {entry_json("s1"), entry_json("s1")}}};
  CHECK(code_of([&] { parse_manifest(dup, "."); }) == ErrorCode::duplicate_scene_id);

  CHECK(parse_manifest(nlohmann::json{{"entries", nlohmann::json::array()}}, ".").entries.empty());

  auto bad = entry_json("s1");
  bad.erase("expression");
  try {
    parse_manifest(nlohmann::json{{"entries", {bad}}}, ".");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema_violation);
    CHECK(std::string(e.what()).find("$.entries[0]") != std::string::npos);
  }
  auto cat = entry_json("s1");
  cat["category"] = "medium";
  CHECK(code_of([&] { parse_manifest(nlohmann::json{{"entries", {cat}}}, "."); }) == ErrorCode::schema_violation);
}

TEST_CASE("relative paths resolve against the manifest or RGBDG_DATA_DIR") {
  DatasetManifest m;
  m.base_dir = "/base";
  ::unsetenv("RGBDG_DATA_DIR");
  CHECK(m.resolve("a/b.ppm") == fs::path("/base/a/b.ppm"));
  CHECK(m.resolve("/abs/x.ppm") == fs::path("/abs/x.ppm"));
  ::setenv("RGBDG_DATA_DIR", "/override", 1);
  CHECK(m.resolve("a/b.ppm") == fs::path("/override/a/b.ppm"));
  ::unsetenv("RGBDG_DATA_DIR");
}

TEST_CASE("scenes and manifests round-trip through disk") {
  TempDir tmp;
  SynthSpec spec = depth_critical_preset(4, 96, 72);
  const Scene scene = generate(spec);
  DatasetManifest m;
  m.base_dir = tmp.path;
  m.entries.push_back(write_scene(scene, tmp.path / scene.id, tmp.path));
  write_manifest(m, tmp.path / "manifest.json");
  const auto back = read_manifest(tmp.path / "manifest.json");
  REQUIRE(back.entries.size() == 1);
  CHECK(back.entries[0] == m.entries[0]);
  const Scene loaded = load_scene(back, back.entries[0]);
  CHECK(loaded.id == scene.id);
  CHECK(loaded.ground_truth == scene.ground_truth);
  CHECK(loaded.category == Category::difficult);
  CHECK(loaded.extent() == scene.extent());
}

TEST_CASE("randomized proposal sets round-trip") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ProposalSet> sets;
    for (int s = 0; s < 1 + trial % 4; ++s) {
      ProposalSet set;
      set.scene_id = "scene-" + std::to_string(trial) + "-" + std::to_string(s);
      set.mode = s % 2 ? Mode::rgb : Mode::rgbd;
      for (int r = 1; r <= 1 + static_cast<int>(u(rng) * 6); ++r) {
        const int x = static_cast<int>(u(rng) * 300), y = static_cast<int>(u(rng) * 200);
        set.proposals.push_back(RegionProposal{r, BoundingBox(x, y, x + 5 + r, y + 3), round_sig9(u(rng)),
                                               150 + static_cast<std::int64_t>(u(rng) * 5000)});
      }
      sets.push_back(set);
    }
    std::stringstream buf;
    write_proposals(sets, buf);
    CHECK(parse_proposals(buf) == sets);
  }
}

TEST_CASE("proposal lines have a fixed key order and nine significant digits") {
  ProposalSet set{"s1", Mode::rgbd, {RegionProposal{1, BoundingBox(2, 3, 4, 7), 0.123456789123, 200}}};
  std::stringstream buf;
  write_proposals({set}, buf);
  CHECK(buf.str() ==
        "{\"scene_id\":\"s1\",\"mode\":\"rgbd\",\"rank\":1,\"box\":[2,3,4,7],\"activation\":0.123456789,"
        "\"pixel_count\":200}\n");
  std::stringstream bad("{\"scene_id\":\"s1\"}\n");
  CHECK(code_of([&] { parse_proposals(bad); }) == ErrorCode::schema_violation);
}

TEST_CASE("report JSON carries tables and chi-squared errors") {
  std::vector<MatchReport> reports;
  for (int i = 0; i < 4; ++i) {
    MatchReport a{"s" + std::to_string(i), Mode::rgbd, Category::difficult, MatchRank::first, {0.5}};
    MatchReport b{"s" + std::to_string(i), Mode::rgb, Category::difficult, i % 2 ? MatchRank::none : MatchRank::first,
                  {-0.2}};
    reports.push_back(a);
    reports.push_back(b);
  }
  const auto report = summarize(reports, {Mode::rgbd, Mode::rgb});
  const auto doc = report_to_json(report);
  CHECK(doc["modes"] == nlohmann::ordered_json({"rgbd", "rgb"}));
  CHECK(doc["matches"].size() == 8);
  REQUIRE(doc["tables"].size() == 3);
  CHECK(doc["tables"][0]["name"] == "whole");
  CHECK(doc["tables"][0]["rows"][0]["first"] == 4);
  CHECK(doc["tables"][0]["rows"][1]["none"] == 2);
  CHECK(doc["tables"][0]["rows"][1]["total"] == 4);
  CHECK(doc["tables"][0]["chi_squared"].contains("error"));
  CHECK(doc["tables"][1]["chi_squared"].contains("error"));
}

TEST_CASE("synth spec documents parse and validate") {
  const auto doc = nlohmann::json::parse(R"({
    "id": "pair", "width": 64, "height": 48,
    "blobs": [{"center": [16, 24], "radius_sigma": 5, "peak": 1.0, "depth": 0.3},
              {"center": [48, 24], "radius_sigma": 5, "peak": 1.0, "depth": 0.7}],
    "rgb_active_blobs": [0, 1], "depth_active_blobs": [0], "target": 0,
    "noise_amplitude": 0.02, "seed": 9, "expression": "the left one", "category": "difficult"})");
  const SynthSpec spec = parse_synth_spec(doc);
  CHECK(spec.blobs.size() == 2);
  CHECK(spec.blobs[1].center_x == 48.0);
  CHECK(spec.category == Category::difficult);
  auto bad = doc;
  bad["target"] = 5;
  CHECK(code_of([&] { generate(parse_synth_spec(bad)); }) == ErrorCode::invalid_spec);
}
