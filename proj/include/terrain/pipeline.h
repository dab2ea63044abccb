#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "terrain/config.h"
#include "terrain/grid.h"
#include "terrain/segmentation.h"
#include "terrain/ssta.h"

namespace terrain {

/// Raised when a stage fails; what() starts with the stage name.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Dump { Disparity, Normals, Labels, Overlay, Ply, Report };
using DumpSet = std::set<Dump>;

/// Comma-separated subset of disparity,normals,labels,overlay,ply,report;
/// "all" selects everything.
DumpSet parse_dumps(std::string_view text);

struct OutputOptions {
  std::filesystem::path directory;  // empty: write nothing
  DumpSet dumps;
};

/// Wall-clock milliseconds per stage.
struct StageTimings {
  double stereo = 0.0;
  double reconstruction = 0.0;
  double normals = 0.0;
  double segmentation = 0.0;
  double ssta = 0.0;
  double output = 0.0;
};

struct FrameResult {
  std::string frame_id;
  int width = 0;
  int height = 0;
  StageTimings timings;
  double valid_fraction = 0.0;
  bool accepted = false;
  ClassHistogram histogram{};
  std::optional<SurfacePlane> dominant;
  std::string error;  // set only for frames that could not be processed
};

/// Intermediate products of one frame, for callers that want more than the summary.
struct FrameProducts {
  DisparityMap disparity;
  OrganizedPointCloud cloud;
  NormalMap normals;
  SegmentLabels labels;
  TerrainClassification classification;
};

/// Stereo matching through classification, with the requested dumps.
/// A rejected frame is a normal result (accepted = false), not an error.
FrameResult run_frame(const GrayImage& left, const GrayImage& right, const PipelineConfig& config,
                      const std::string& frame_id = "frame", const OutputOptions& output = {},
                      FrameProducts* products = nullptr);

/// Same as run_frame, starting from a ready disparity map. `left` is only
/// used for overlays and point colours.
FrameResult run_frame_from_disparity(const DisparityMap& disparity, const GrayImage& left,
                                     const PipelineConfig& config,
                                     const std::string& frame_id = "frame",
                                     const OutputOptions& output = {},
                                     FrameProducts* products = nullptr);

/// One stereo pair `<index>_left.<ext>` / `<index>_right.<ext>` (ext pgm or png).
struct StereoPairFiles {
  std::string index;
  std::filesystem::path left;
  std::filesystem::path right;
};

/// Pairs found in `directory`, in ascending numeric index order.
std::vector<StereoPairFiles> find_stereo_pairs(const std::filesystem::path& directory);

/// Processes every pair independently; unreadable or failing frames are
/// recorded with `error` set and the sequence continues. Writes
/// `summary.jsonl` into output.directory when one is given. Throws
/// PipelineError when the directory holds no pairs.
std::vector<FrameResult> run_sequence(const std::filesystem::path& directory,
                                      const PipelineConfig& config,
                                      const OutputOptions& output = {});

/// One JSON object per frame (no trailing newline).
std::string summary_line(const FrameResult& result, bool include_timings = true);

}  // namespace terrain
