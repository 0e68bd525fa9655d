#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rgbdg/clustering.hpp"
#include "rgbdg/evaluation.hpp"
#include "rgbdg/scene.hpp"
#include "rgbdg/synth.hpp"

namespace rgbdg {

// Rasters ------------------------------------------------------------------
//
// Heatmaps: binary PPM (P6) or float CSV. Depth maps: binary PGM (P5, 8- or
// 16-bit big-endian) or float CSV. The format follows the file extension.
// CSV layout: first line "width,height", then one line per row holding the
// row's values (three per pixel for heatmaps) separated by commas.

ActivationHeatmap read_heatmap(const std::filesystem::path& path);
DepthMap read_depth(const std::filesystem::path& path);

/// Parsers over in-memory bytes; `source` only labels error messages.
ActivationHeatmap parse_ppm(const std::string& bytes, const std::string& source = "<memory>");
DepthMap parse_pgm(const std::string& bytes, const std::string& source = "<memory>");
ActivationHeatmap parse_heatmap_csv(const std::string& text, const std::string& source = "<memory>");
DepthMap parse_depth_csv(const std::string& text, const std::string& source = "<memory>");

/// PPM quantizes to 8 bits; CSV keeps 9 significant digits.
void write_heatmap(const ActivationHeatmap& heatmap, const std::filesystem::path& path);
/// PGM is written with maxval 65535.
void write_depth(const DepthMap& depth, const std::filesystem::path& path);
void write_ppm(const Image8& image, const std::filesystem::path& path);
Image8 read_ppm_image(const std::filesystem::path& path);

// Manifests ----------------------------------------------------------------

struct ManifestEntry {
  std::string scene_id;
  std::string rgb_heatmap_path;
  std::string depth_heatmap_path;
  std::string depth_map_path;
  std::string expression;
  BoundingBox ground_truth;
  Category category = Category::easy;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  /// Directory relative raster paths are resolved against.
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  /// Absolute paths pass through; relative ones go under RGBDG_DATA_DIR when
  /// it is set, otherwise under base_dir.
  std::filesystem::path resolve(const std::string& path) const;
  const ManifestEntry* find(const std::string& scene_id) const;
};

DatasetManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Loads and validates every raster of an entry.
Scene load_scene(const DatasetManifest& manifest, const ManifestEntry& entry);

/// Writes a scene's rasters under `dir` (rgb_heatmap.ppm, depth_heatmap.ppm,
/// depth_map.pgm) and returns the matching entry with paths relative to
/// `relative_to`.
ManifestEntry write_scene(const Scene& scene, const std::filesystem::path& dir,
                          const std::filesystem::path& relative_to);

// Proposals and reports ----------------------------------------------------

/// Rounds to 9 significant digits; serialized JSON then prints at most 9.
double round_sig9(double value);

nlohmann::ordered_json proposal_to_json(const ProposalSet& set, const RegionProposal& proposal);
/// One JSON object per line, one line per proposal.
void write_proposals(const std::vector<ProposalSet>& sets, std::ostream& out);
void write_proposals(const ProposalSet& set, const std::filesystem::path& path);
void write_proposals(const std::vector<ProposalSet>& sets, const std::filesystem::path& path);
/// Groups consecutive lines by (scene_id, mode). Empty sets have no lines and
/// therefore do not come back.
std::vector<ProposalSet> parse_proposals(std::istream& in, const std::string& source = "<memory>");
std::vector<ProposalSet> read_proposals(const std::filesystem::path& path);

struct TableSummary {
  std::string name;  // whole, easy or difficult
  ContingencyTable table;
  std::optional<ChiSquared> chi_squared;
  std::string chi_squared_error;  // set when the statistic is undefined
};

struct EvaluationReport {
  std::vector<Mode> modes;
  std::vector<MatchReport> reports;  // scene order, modes interleaved
  std::vector<TableSummary> tables;
};

/// Whole-dataset, easy and difficult tables with their chi-squared results.
EvaluationReport summarize(std::vector<MatchReport> reports, const std::vector<Mode>& modes);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);
void write_report(const EvaluationReport& report, const std::filesystem::path& path);

SynthSpec parse_synth_spec(const nlohmann::json& doc);
SynthSpec read_synth_spec(const std::filesystem::path& path);

}  // namespace rgbdg
