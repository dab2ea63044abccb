#include "terrain/pipeline.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "terrain/image_io.h"
#include "terrain/normals.h"
#include "terrain/reconstruction.h"
#include "terrain/render.h"
#include "terrain/stereo_matching.h"

namespace terrain {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Runs one stage, timing it and tagging any exception with the stage name.
template <typename Fn>
auto run_stage(const char* name, double& timing, Fn&& fn) {
  const auto start = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timing = elapsed_ms(start);
    } else {
      auto value = fn();
      timing = elapsed_ms(start);
      return value;
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

void write_dumps(const OutputOptions& output, const std::string& frame_id,
                 const FrameProducts& products, const GrayImage& left, const PipelineConfig& config) {
  if (output.directory.empty() || output.dumps.empty()) return;
  std::filesystem::create_directories(output.directory);
  auto path = [&](const char* suffix) {
    return (output.directory / fmt::format("{}_{}", frame_id, suffix)).string();
  };
  const auto& dumps = output.dumps;
  if (dumps.count(Dump::Disparity)) {
    write_pgm16(path("disparity.pgm"), encode_disparity(products.disparity));
    write_pgm(path("disparity_vis.pgm"),
              disparity_visualization(products.disparity, config.matcher.max_disparity));
  }
  if (dumps.count(Dump::Normals)) write_ppm(path("normals.ppm"), normal_map_image(products.normals));
  if (dumps.count(Dump::Labels)) {
    write_ppm(path("labels.ppm"), label_image(products.labels));
    write_text(path("segments.txt"), segment_sizes_text(products.labels));
  }
  if (dumps.count(Dump::Overlay)) {
    write_ppm(path("overlay.ppm"), class_overlay(products.classification.classes, left));
  }
  if (dumps.count(Dump::Ply)) {
    write_text(path("cloud.ply"), ply_text(products.cloud, products.classification.classes, left));
  }
  if (dumps.count(Dump::Report)) {
    write_text(path("report.txt"), segment_report_text(products.classification));
  }
}

FrameResult analyze(const DisparityMap& disparity, const GrayImage& left,
                    const PipelineConfig& config, const std::string& frame_id,
                    const OutputOptions& output, FrameProducts* products, StageTimings timings) {
  FrameProducts local;
  FrameProducts& p = products != nullptr ? *products : local;
  p.disparity = disparity;

  FrameResult result;
  result.frame_id = frame_id;
  result.width = disparity.width();
  result.height = disparity.height();

  p.cloud = run_stage("reconstruction", timings.reconstruction, [&] {
    validate_for_image(config.camera, disparity.width(), disparity.height());
    return triangulate(disparity, config.camera, config.reconstruction);
  });
  result.valid_fraction = valid_fraction(p.cloud);

  p.normals = run_stage("normals", timings.normals,
                        [&] { return estimate_normals(p.cloud, config.normals, config.camera); });
  p.labels = run_stage("segmentation", timings.segmentation, [&] {
    return segment_by_normals(p.cloud, p.normals, config.traversability.alpha_r);
  });
  p.classification = run_stage("ssta", timings.ssta, [&] {
    const auto gravity = gravity_in_cloud_frame(config.camera.tilt_theta, config.cloud_to_gravity);
    const auto planes = fit_all_planes(p.cloud, p.labels, gravity);
    return classify_terrain(p.cloud, p.normals, p.labels, planes, gravity, config.traversability);
  });
  result.accepted = p.classification.accepted;
  result.histogram = p.classification.histogram;
  result.dominant = p.classification.dominant;

  run_stage("output", timings.output, [&] { write_dumps(output, frame_id, p, left, config); });
  result.timings = timings;
  return result;
}

}  // namespace

PipelineError::PipelineError(std::string stage, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", stage, message)), stage_(std::move(stage)) {}

DumpSet parse_dumps(std::string_view text) {
  DumpSet out;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item == "all") {
      out = {Dump::Disparity, Dump::Normals, Dump::Labels, Dump::Overlay, Dump::Ply, Dump::Report};
    } else if (item == "disparity") {
      out.insert(Dump::Disparity);
    } else if (item == "normals") {
      out.insert(Dump::Normals);
    } else if (item == "labels") {
      out.insert(Dump::Labels);
    } else if (item == "overlay") {
      out.insert(Dump::Overlay);
    } else if (item == "ply") {
      out.insert(Dump::Ply);
    } else if (item == "report") {
      out.insert(Dump::Report);
    } else {
      throw std::invalid_argument(fmt::format("unknown dump '{}'", item));
    }
  }
  return out;
}

FrameResult run_frame(const GrayImage& left, const GrayImage& right, const PipelineConfig& config,
                      const std::string& frame_id, const OutputOptions& output,
                      FrameProducts* products) {
  StageTimings timings;
  const DisparityMap disparity = run_stage("stereo", timings.stereo, [&] {
    return match_stereo(left, right, config.matcher);
  });
  return analyze(disparity, left, config, frame_id, output, products, timings);
}

FrameResult run_frame_from_disparity(const DisparityMap& disparity, const GrayImage& left,
                                     const PipelineConfig& config, const std::string& frame_id,
                                     const OutputOptions& output, FrameProducts* products) {
  if (!left.same_shape(disparity)) {
    throw PipelineError("stereo", "disparity map and left image differ in size");
  }
  return analyze(disparity, left, config, frame_id, output, products, StageTimings{});
}

std::vector<StereoPairFiles> find_stereo_pairs(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw PipelineError("sequence", fmt::format("'{}' is not a directory", directory.string()));
  }
  static const std::regex left_name(R"(^(\d+)_left\.(pgm|png)$)", std::regex::icase);
  std::vector<StereoPairFiles> pairs;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch match;
    if (!std::regex_match(name, match, left_name)) continue;
    const fs::path right = directory / fmt::format("{}_right.{}", match[1].str(), match[2].str());
    if (!fs::exists(right)) continue;
    pairs.push_back({match[1].str(), entry.path(), right});
  }
  std::sort(pairs.begin(), pairs.end(), [](const StereoPairFiles& a, const StereoPairFiles& b) {
    const auto ka = a.index.find_first_not_of('0');
    const auto kb = b.index.find_first_not_of('0');
    const std::string_view sa = ka == std::string::npos ? "" : std::string_view(a.index).substr(ka);
    const std::string_view sb = kb == std::string::npos ? "" : std::string_view(b.index).substr(kb);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    return a.index < b.index;
  });
  return pairs;
}

std::vector<FrameResult> run_sequence(const std::filesystem::path& directory,
                                      const PipelineConfig& config, const OutputOptions& output) {
  const auto pairs = find_stereo_pairs(directory);
  if (pairs.empty()) {
    throw PipelineError("sequence", fmt::format("no stereo pairs in '{}'", directory.string()));
  }
  std::vector<FrameResult> results;
  for (const auto& pair : pairs) {
    try {
      const GrayImage left = read_gray_image(pair.left.string());
      const GrayImage right = read_gray_image(pair.right.string());
      results.push_back(run_frame(left, right, config, pair.index, output));
    } catch (const std::exception& e) {
      FrameResult failed;
      failed.frame_id = pair.index;
      failed.error = e.what();
      results.push_back(std::move(failed));
    }
  }
  if (!output.directory.empty()) {
    std::filesystem::create_directories(output.directory);
    std::string text;
    for (const auto& r : results) text += summary_line(r) + "\n";
    write_text((output.directory / "summary.jsonl").string(), text);
  }
  return results;
}

std::string summary_line(const FrameResult& result, bool include_timings) {
  nlohmann::ordered_json j;
  j["frame"] = result.frame_id;
  j["status"] = result.error.empty() ? "ok" : "error";
  if (!result.error.empty()) j["error"] = result.error;
  j["width"] = result.width;
  j["height"] = result.height;
  if (include_timings) {
    j["timings_ms"] = {{"stereo", result.timings.stereo},
                       {"reconstruction", result.timings.reconstruction},
                       {"normals", result.timings.normals},
                       {"segmentation", result.timings.segmentation},
                       {"ssta", result.timings.ssta},
                       {"output", result.timings.output}};
  }
  j["valid_fraction"] = result.valid_fraction;
  j["accepted"] = result.accepted;
  nlohmann::ordered_json histogram;
  for (std::size_t i = 0; i < kClassCount; ++i) {
    histogram[std::string(to_string(static_cast<TraversabilityClass>(i)))] = result.histogram[i];
  }
  j["histogram"] = histogram;
  if (result.dominant) {
    const auto& d = *result.dominant;
    j["dominant"] = {{"segment_id", d.segment_id},
                     {"inlier_count", d.inlier_count},
                     {"normal", {d.normal.x(), d.normal.y(), d.normal.z()}},
                     {"offset", d.offset},
                     {"centroid", {d.centroid.x(), d.centroid.y(), d.centroid.z()}}};
  } else {
    j["dominant"] = nullptr;
  }
  return j.dump();
}

}  // namespace terrain
