// rgbdg: command-line front end for the RGB-D referring-region pipeline.
//
//   rgbdg propose  --manifest m.json [--scene ID] --mode rgbd --out proposals.jsonl
//   rgbdg evaluate --manifest m.json --modes rgbd,rgb --report report.json
//   rgbdg synth    --preset depth-critical --count 3 --seed 7 --out data/
//   rgbdg overlay  --manifest m.json --scene ID --proposals p.jsonl --out overlay.ppm
//
// Exit codes: 0 success, 2 usage or input error, 3 internal invariant violation.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "rgbdg/clustering.hpp"
#include "rgbdg/evaluation.hpp"
#include "rgbdg/scene_io.hpp"
#include "rgbdg/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineFlags {
  rgbdg::FusionConfig fusion;
  rgbdg::RegionCountConfig region;
  rgbdg::ClusteringConfig cluster;
  int connectivity = 8;
  std::string feature_activity = "red-green";
  int workers = 1;

  void add_to(CLI::App* app) {
    app->add_option("--t-rgb", fusion.t_rgb, "Fusion activity threshold")->capture_default_str();
    app->add_option("--high-threshold", region.high_activity_threshold, "Region-count activity threshold")
        ->capture_default_str();
    app->add_option("--min-region-area", region.min_region_area, "Smallest counted region, in pixels")
        ->capture_default_str();
    app->add_flag("!--no-background", region.count_background, "Do not count the background as a region");
    app->add_option("--connectivity", connectivity, "Pixel connectivity (4 or 8)")
        ->check(CLI::IsMember({4, 8}))
        ->capture_default_str();
    app->add_option("--kernel-size", cluster.kernel_size, "Gaussian kernel size (odd)")->capture_default_str();
    app->add_option("--kernel-sigma", cluster.kernel_sigma, "Gaussian standard deviation")->capture_default_str();
    app->add_option("--active-threshold", cluster.post_smooth_active_threshold, "Post-smoothing activity threshold")
        ->capture_default_str();
    app->add_option("--feature-activity", feature_activity, "Channels tested after smoothing")
        ->check(CLI::IsMember({"red-green", "red-blue"}))
        ->capture_default_str();
    app->add_option("--min-cluster-area", cluster.min_cluster_area, "Smallest kept cluster, in pixels")
        ->capture_default_str();
    app->add_option("--w-r", cluster.w_r, "Red weight of the cluster activation")->capture_default_str();
    app->add_option("--w-g", cluster.w_g, "Green weight of the cluster activation")->capture_default_str();
    app->add_option("--seed", cluster.kmeans_seed, "K-means seed")->capture_default_str();
    app->add_option("--max-iters", cluster.kmeans_max_iters, "K-means iteration cap")->capture_default_str();
    app->add_option("--tol", cluster.kmeans_tol, "K-means centroid movement tolerance")->capture_default_str();
    app->add_option("--workers", workers, "Scenes processed concurrently")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  void finalize() {
    const auto c = connectivity == 4 ? rgbdg::Connectivity::four : rgbdg::Connectivity::eight;
    region.connectivity = c;
    cluster.connectivity = c;
    cluster.feature_activity =
        feature_activity == "red-blue" ? rgbdg::FeatureActivity::red_blue : rgbdg::FeatureActivity::red_green;
    fusion.validate();
    region.validate();
    cluster.validate();
#ifdef _OPENMP
    omp_set_num_threads(workers);
#endif
  }

  rgbdg::ClusteringConfig for_mode(rgbdg::Mode mode) const {
    rgbdg::ClusteringConfig c = cluster;
    c.mode = mode;
    return c;
  }
};

// Ordering and bounds of a pipeline result; a failure here is a bug.
void check_invariants(const rgbdg::ProposalSet& set, rgbdg::Extent extent, int min_area) {
  for (std::size_t i = 0; i < set.proposals.size(); ++i) {
    const auto& p = set.proposals[i];
    if (p.rank != static_cast<int>(i) + 1) throw std::logic_error("proposal ranks have gaps");
    if (!(p.activation >= 0.0 && p.activation <= 1.0)) throw std::logic_error("activation outside [0,1]");
    if (i > 0 && p.activation > set.proposals[i - 1].activation) throw std::logic_error("activations increase");
    if (!p.box.within(extent)) throw std::logic_error("proposal box outside the image");
    if (p.pixel_count < min_area) throw std::logic_error("proposal below the minimum cluster area");
  }
}

rgbdg::ProposalSet run_mode(const rgbdg::Scene& scene, rgbdg::Mode mode, const PipelineFlags& flags) {
  rgbdg::ProposalSet set = rgbdg::propose(scene, flags.fusion, flags.region, flags.for_mode(mode));
  check_invariants(set, scene.extent(), flags.cluster.min_cluster_area);
  return set;
}

// Runs `body(i)` for i in [0, n) across the configured workers and rethrows
// the first failure in index order.
template <typename Body>
void for_each_scene(std::size_t n, Body body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<rgbdg::Mode> parse_modes(const std::string& list) {
  std::vector<rgbdg::Mode> modes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const rgbdg::Mode m = rgbdg::mode_from_string(item);
    for (rgbdg::Mode seen : modes) {
      if (seen == m) throw UsageError("mode '" + item + "' listed twice");
    }
    modes.push_back(m);
  }
  if (modes.empty()) throw UsageError("no modes given");
  return modes;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void print_summary(const rgbdg::EvaluationReport& report) {
  for (const auto& t : report.tables) {
    std::cout << t.name << "\n";
    std::cout << "  " << pad("mode", 6) << pad("1st", 7) << pad("2nd", 7) << pad("3rd", 7) << pad("none", 7)
              << "total\n";
    for (std::size_t i = 0; i < t.table.modes.size(); ++i) {
      const auto& c = t.table.counts[i];
      std::cout << "  " << pad(rgbdg::to_string(t.table.modes[i]), 6);
      for (auto v : c) std::cout << pad(std::to_string(v), 7);
      std::cout << t.table.row_total(i) << "\n";
    }
    if (t.chi_squared) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  chi-squared(%d) = %.4f\n", t.chi_squared->degrees_of_freedom,
                    t.chi_squared->statistic);
      std::cout << buf;
    } else {
      std::cout << "  chi-squared undefined (" << t.chi_squared_error << ")\n";
    }
  }
}

// --- propose ------------------------------------------------------------------

struct SceneSource {
  std::string manifest;
  std::vector<std::string> scene_ids;
  std::string rgb_heatmap;
  std::string depth_heatmap;
  std::string depth_map;
  std::string id = "scene";

  void add_to(CLI::App* app, bool many) {
    app->add_option("--manifest", manifest, "Dataset manifest (JSON)");
    if (many) {
      app->add_option("--scene", scene_ids, "Scene id(s) from the manifest; all when omitted");
    } else {
      app->add_option("--scene", scene_ids, "Scene id from the manifest")->expected(1);
    }
    app->add_option("--rgb-heatmap", rgb_heatmap, "RGB activation heatmap (.ppm or .csv)");
    app->add_option("--depth-heatmap", depth_heatmap, "Depth activation heatmap (.ppm or .csv)");
    app->add_option("--depth-map", depth_map, "Depth map (.pgm or .csv)");
    app->add_option("--id", id, "Scene id when reading loose files")->capture_default_str();
  }

  bool from_manifest() const {
    if (!manifest.empty() && !rgb_heatmap.empty()) throw UsageError("use either --manifest or --rgb-heatmap, not both");
    if (manifest.empty() && rgb_heatmap.empty()) throw UsageError("a scene needs --manifest or --rgb-heatmap");
    return !manifest.empty();
  }
};

int cmd_propose(const SceneSource& src, const std::string& mode_name, const std::string& out_path,
                PipelineFlags& flags) {
  flags.finalize();
  const rgbdg::Mode mode = rgbdg::mode_from_string(mode_name);
  std::vector<rgbdg::ProposalSet> sets;

  if (src.from_manifest()) {
    const rgbdg::DatasetManifest manifest = rgbdg::read_manifest(src.manifest);
    std::vector<const rgbdg::ManifestEntry*> entries;
    if (src.scene_ids.empty()) {
      for (const auto& e : manifest.entries) entries.push_back(&e);
    } else {
      for (const auto& id : src.scene_ids) {
        const auto* e = manifest.find(id);
        if (e == nullptr) throw UsageError("scene '" + id + "' is not in " + src.manifest);
        entries.push_back(e);
      }
    }
    if (entries.empty()) throw UsageError("manifest " + src.manifest + " lists no scenes");
    sets.resize(entries.size());
    for_each_scene(entries.size(), [&](std::size_t i) {
      const rgbdg::ManifestEntry& e = *entries[i];
      if (mode == rgbdg::Mode::rgb) {
        const auto h = rgbdg::read_heatmap(manifest.resolve(e.rgb_heatmap_path));
        sets[i] = rgbdg::propose_rgb_trace(e.scene_id, h, flags.region, flags.for_mode(mode)).proposals;
        check_invariants(sets[i], h.extent(), flags.cluster.min_cluster_area);
      } else {
        sets[i] = run_mode(rgbdg::load_scene(manifest, e), mode, flags);
      }
    });
  } else {
    const auto h_rgb = rgbdg::read_heatmap(src.rgb_heatmap);
    if (mode == rgbdg::Mode::rgb) {
      sets.push_back(rgbdg::propose_rgb_trace(src.id, h_rgb, flags.region, flags.for_mode(mode)).proposals);
      check_invariants(sets.back(), h_rgb.extent(), flags.cluster.min_cluster_area);
    } else {
      if (src.depth_heatmap.empty()) throw UsageError("rgbd mode needs --depth-heatmap");
      if (src.depth_map.empty()) throw UsageError("rgbd mode needs --depth-map");
      const auto h_depth = rgbdg::read_heatmap(src.depth_heatmap);
      const auto depth = rgbdg::read_depth(src.depth_map);
      auto trace = rgbdg::propose_rgbd_trace(src.id, h_rgb, h_depth, depth, flags.fusion, flags.region,
                                             flags.for_mode(mode));
      check_invariants(trace.proposals, h_rgb.extent(), flags.cluster.min_cluster_area);
      sets.push_back(std::move(trace.proposals));
    }
  }

  rgbdg::write_proposals(sets, fs::path(out_path));
  for (const auto& s : sets) {
    std::cout << s.scene_id << " [" << rgbdg::to_string(s.mode) << "]: " << s.proposals.size() << " candidate(s)";
    if (!s.proposals.empty()) {
      const auto& b = s.proposals.front().box;
      std::cout << ", top (" << b.x_min() << "," << b.y_min() << "," << b.x_max() << "," << b.y_max() << ")";
    }
    std::cout << "\n";
  }
  return kExitOk;
}

// --- evaluate -----------------------------------------------------------------

int cmd_evaluate(const std::string& manifest_path, const std::string& modes_list, const std::string& report_path,
                 const std::string& proposals_path, PipelineFlags& flags) {
  flags.finalize();
  const std::vector<rgbdg::Mode> modes = parse_modes(modes_list);
  const rgbdg::DatasetManifest manifest = rgbdg::read_manifest(manifest_path);
  if (manifest.entries.empty()) throw UsageError("manifest " + manifest_path + " lists no scenes; nothing to evaluate");

  const std::size_t n = manifest.entries.size();
  std::vector<rgbdg::MatchReport> reports(n * modes.size());
  std::vector<rgbdg::ProposalSet> sets(n * modes.size());
  for_each_scene(n, [&](std::size_t i) {
    const rgbdg::ManifestEntry& e = manifest.entries[i];
    const rgbdg::Scene scene = rgbdg::load_scene(manifest, e);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::size_t slot = i * modes.size() + m;
      sets[slot] = run_mode(scene, modes[m], flags);
      reports[slot] = rgbdg::match_rank(sets[slot], scene.ground_truth, scene.category);
    }
  });

  const rgbdg::EvaluationReport report = rgbdg::summarize(std::move(reports), modes);
  rgbdg::write_report(report, fs::path(report_path));
  if (!proposals_path.empty()) rgbdg::write_proposals(sets, fs::path(proposals_path));
  print_summary(report);
  return kExitOk;
}

// --- synth --------------------------------------------------------------------

int cmd_synth(const std::string& preset, const std::string& spec_path, int count, std::uint64_t seed,
              const std::string& out_dir, int width, int height, double noise) {
  if (count < 1) throw UsageError("--count must be positive");
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw rgbdg::Error(rgbdg::ErrorCode::io_failure, "cannot create " + out.string() + ": " + ec.message());

  rgbdg::DatasetManifest manifest;
  manifest.base_dir = out;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    rgbdg::SynthSpec spec;
    if (!spec_path.empty()) {
      spec = rgbdg::read_synth_spec(spec_path);
      if (count > 1) {
        spec.seed = spec.seed + static_cast<std::uint64_t>(i);
        spec.id += "-" + std::to_string(i + 1);
      }
    } else if (preset == "depth-critical" || (preset == "mixed" && i % 2 == 0)) {
      spec = rgbdg::depth_critical_preset(s, width, height);
    } else {
      spec = rgbdg::easy_preset(s, width, height);
    }
    if (noise >= 0.0) spec.noise_amplitude = noise;
    const rgbdg::Scene scene = rgbdg::generate(spec);
    if (manifest.find(scene.id) != nullptr) throw UsageError("duplicate scene id '" + scene.id + "'");
    manifest.entries.push_back(rgbdg::write_scene(scene, out / scene.id, out));
  }
  rgbdg::write_manifest(manifest, out / "manifest.json");
  std::cout << "wrote " << manifest.entries.size() << " scene(s) and " << (out / "manifest.json").string() << "\n";
  return kExitOk;
}

// --- overlay ------------------------------------------------------------------

int cmd_overlay(const SceneSource& src, const std::string& proposals_path, const std::string& mode_name,
                const std::string& out_path, PipelineFlags& flags) {
  flags.finalize();
  rgbdg::Scene scene;
  if (src.from_manifest()) {
    const rgbdg::DatasetManifest manifest = rgbdg::read_manifest(src.manifest);
    if (src.scene_ids.size() != 1) throw UsageError("overlay needs exactly one --scene");
    const auto* e = manifest.find(src.scene_ids.front());
    if (e == nullptr) throw UsageError("scene '" + src.scene_ids.front() + "' is not in " + src.manifest);
    scene = rgbdg::load_scene(manifest, *e);
  } else {
    throw UsageError("overlay reads its scene from --manifest");
  }

  const auto sets = rgbdg::read_proposals(proposals_path);
  const rgbdg::ProposalSet* chosen = nullptr;
  bool any_for_scene = false;
  for (const auto& s : sets) {
    if (s.scene_id != scene.id) continue;
    any_for_scene = true;
    if (mode_name.empty() || rgbdg::to_string(s.mode) == mode_name) {
      chosen = &s;
      break;
    }
  }
  if (chosen == nullptr) {
    if (!sets.empty() && !any_for_scene) {
      throw UsageError("proposals in " + proposals_path + " belong to scene '" + sets.front().scene_id + "', not '" +
                       scene.id + "'");
    }
    if (any_for_scene) throw UsageError("no " + mode_name + " proposals for scene '" + scene.id + "'");
  }
  rgbdg::ProposalSet empty{scene.id, mode_name.empty() ? rgbdg::Mode::rgbd : rgbdg::mode_from_string(mode_name), {}};
  rgbdg::render_overlay(scene, chosen ? *chosen : empty, fs::path(out_path), flags.fusion);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RGB-D referring-region proposals: fuse activation heatmaps, cluster, rank and evaluate"};
  app.require_subcommand(1);

  PipelineFlags propose_flags, evaluate_flags, overlay_flags;

  auto* propose = app.add_subcommand("propose", "Run the pipeline and write ranked candidate boxes (JSON Lines)");
  SceneSource propose_src;
  std::string propose_mode = "rgbd";
  std::string propose_out;
  propose_src.add_to(propose, true);
  propose->add_option("--mode", propose_mode, "rgbd or rgb")
      ->check(CLI::IsMember({"rgbd", "rgb"}))
      ->capture_default_str();
  propose->add_option("--out", propose_out, "Output .jsonl")->required();
  propose_flags.add_to(propose);

  auto* evaluate = app.add_subcommand("evaluate", "Match candidates against ground truth and tabulate outcomes");
  std::string eval_manifest, eval_modes = "rgbd,rgb", eval_report, eval_proposals;
  evaluate->add_option("--manifest", eval_manifest, "Dataset manifest (JSON)")->required();
  evaluate->add_option("--modes", eval_modes, "Comma-separated modes")->capture_default_str();
  evaluate->add_option("--report", eval_report, "Output report (JSON)")->required();
  evaluate->add_option("--proposals", eval_proposals, "Also write every candidate set (.jsonl)");
  evaluate_flags.add_to(evaluate);

  auto* synth = app.add_subcommand("synth", "Generate synthetic scenes and a manifest");
  std::string synth_preset = "depth-critical", synth_spec, synth_out;
  int synth_count = 1, synth_width = 320, synth_height = 240;
  std::uint64_t synth_seed = 1;
  double synth_noise = -1.0;
  synth->add_option("--preset", synth_preset, "depth-critical, easy or mixed")
      ->check(CLI::IsMember({"depth-critical", "easy", "mixed"}))
      ->capture_default_str();
  synth->add_option("--spec", synth_spec, "Scene spec (JSON) instead of a preset");
  synth->add_option("--count", synth_count, "Number of scenes")->capture_default_str();
  synth->add_option("--seed", synth_seed, "First seed; scene i uses seed + i")->capture_default_str();
  synth->add_option("--width", synth_width, "Preset image width")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--height", synth_height, "Preset image height")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--noise", synth_noise, "Override the noise amplitude")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--out", synth_out, "Output directory")->required();

  auto* overlay = app.add_subcommand("overlay", "Render ground truth and candidates over the fused heatmap (PPM)");
  SceneSource overlay_src;
  std::string overlay_proposals, overlay_mode, overlay_out;
  overlay_src.add_to(overlay, false);
  overlay->add_option("--proposals", overlay_proposals, "Candidate boxes (.jsonl)")->required();
  overlay->add_option("--mode", overlay_mode, "Pick this mode's candidates when the file holds several")
      ->check(CLI::IsMember({"rgbd", "rgb"}));
  overlay->add_option("--out", overlay_out, "Output .ppm")->required();
  overlay_flags.add_to(overlay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*propose) return cmd_propose(propose_src, propose_mode, propose_out, propose_flags);
    if (*evaluate) return cmd_evaluate(eval_manifest, eval_modes, eval_report, eval_proposals, evaluate_flags);
    if (*synth) {
      return cmd_synth(synth_spec.empty() ? synth_preset : "", synth_spec, synth_count, synth_seed, synth_out,
                       synth_width, synth_height, synth_noise);
    }
    if (*overlay) return cmd_overlay(overlay_src, overlay_proposals, overlay_mode, overlay_out, overlay_flags);
  } catch (const rgbdg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}
