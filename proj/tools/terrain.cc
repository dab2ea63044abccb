// Command-line front end: analyze one pair, run a directory sequence, or
// render a synthetic scene.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "terrain/config.h"
#include "terrain/image_io.h"
#include "terrain/pipeline.h"
#include "terrain/render.h"
#include "terrain/synthetic.h"

namespace fs = std::filesystem;
using namespace terrain;

namespace {

/// Config file, then TERRAIN_* environment variables, then --key flags.
PipelineConfig resolve_config(const std::string& path, const std::map<std::string, std::string>& flags) {
  KeyValueDocument doc = KeyValueDocument::parse_file(path);
  apply_env_overrides(doc);
  for (const auto& [key, value] : flags) {
    if (!value.empty()) doc.set(key, value);
  }
  return load_config(doc);
}

void add_config_flags(CLI::App* cmd, std::map<std::string, std::string>& flags) {
  for (const auto& key : config_keys()) {
    cmd->add_option("--" + key, flags[key], "override config key '" + key + "'");
  }
}

int write_synth(const std::string& scene_path, const fs::path& out, const std::string& index) {
  const SceneSpec scene = load_scene_file(scene_path);
  const RenderedScene r = render_scene(scene);
  fs::create_directories(out);
  const auto path = [&](const std::string& name) { return (out / name).string(); };
  write_pgm(path(index + "_left.pgm"), r.left);
  write_pgm(path(index + "_right.pgm"), r.right);
  write_pgm16(path("truth_disparity.pgm"), encode_disparity(r.truth.disparity));
  write_ppm(path("truth_normals.ppm"), normal_map_image(r.truth.normals));
  write_ppm(path("truth_labels.ppm"), label_image(SegmentLabels{r.truth.labels,
                                                                static_cast<int>(scene.patches.size())}));
  write_ppm(path("truth_classes.ppm"), class_overlay(r.truth.classes, r.left));

  std::string report = fmt::format("accepted {}\ndominant_patch {}\npatch pixels slope_deg step_m class\n",
                                   r.truth.accepted ? 1 : 0, r.truth.dominant_patch);
  for (std::size_t p = 0; p < r.truth.patches.size(); ++p) {
    const auto& t = r.truth.patches[p];
    report += fmt::format("{} {} {:.4f} {:.6f} {}\n", p, t.pixel_count, t.slope * 180.0 / std::numbers::pi,
                          t.step_distance, to_string(t.truth_class));
  }
  write_text(path("truth.txt"), report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo terrain traversability analysis"};
  app.require_subcommand(1);

  std::string config_path, left_path, right_path, out_dir, dumps;
  std::map<std::string, std::string> flags;

  auto* analyze = app.add_subcommand("analyze", "classify one stereo pair");
  analyze->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--left", left_path, "left image (pgm or png)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--right", right_path, "right image (pgm or png)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--out", out_dir, "output directory");
  analyze->add_option("--dump", dumps, "disparity,normals,labels,overlay,ply,report or all");
  add_config_flags(analyze, flags);

  std::string sequence_dir;
  auto* sequence = app.add_subcommand("sequence", "classify every numbered pair in a directory");
  sequence->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  sequence->add_option("--dir", sequence_dir, "input directory")->required();
  sequence->add_option("--out", out_dir, "output directory");
  sequence->add_option("--dump", dumps, "disparity,normals,labels,overlay,ply,report or all");
  add_config_flags(sequence, flags);

  std::string scene_path, index = "0";
  auto* synth = app.add_subcommand("synth", "render a synthetic scene with its ground truth");
  synth->add_option("--scene", scene_path, "scene file")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--index", index, "frame index used in the image names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return write_synth(scene_path, out_dir, index);

    const PipelineConfig config = resolve_config(config_path, flags);
    OutputOptions output;
    output.directory = out_dir;
    output.dumps = parse_dumps(dumps);

    if (*analyze) {
      const GrayImage left = read_gray_image(left_path);
      const GrayImage right = read_gray_image(right_path);
      const FrameResult result = run_frame(left, right, config, "frame", output);
      const std::string line = summary_line(result);
      std::cout << line << '\n';
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text((fs::path(out_dir) / "summary.jsonl").string(), line + "\n");
      }
      return EXIT_SUCCESS;
    }

    const auto results = run_sequence(sequence_dir, config, output);
    for (const auto& r : results) {
      std::cout << summary_line(r) << '\n';
      if (!r.error.empty()) std::cerr << fmt::format("frame {}: {}\n", r.frame_id, r.error);
    }
    return EXIT_SUCCESS;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
}
