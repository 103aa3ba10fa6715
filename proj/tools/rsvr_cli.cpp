#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rsvr/bmf.hpp"
#include "rsvr/io.hpp"
#include "rsvr/metrics.hpp"
#include "rsvr/simulator.hpp"
#include "rsvr/synthesis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

struct ReconstructOptions {
  std::string rs0, rs1, flow01, flow10;
  std::string mode = "abmf";
  std::string mask = "complement";
  std::string splat = "softmax";
  double gamma = 1.0;
  double alpha = 50.0;
};

struct Inputs {
  rsvr::ImageBuffer rs0, rs1;
  rsvr::FlowField f01, f10;
  rsvr::ShutterSpec spec;
  rsvr::ReconstructionConfig cfg;
};

void add_reconstruct_inputs(CLI::App* cmd, ReconstructOptions& o) {
  cmd->add_option("--rs0", o.rs0, "Rolling-shutter frame 0")->required();
  cmd->add_option("--rs1", o.rs1, "Rolling-shutter frame 1")->required();
  cmd->add_option("--flow01", o.flow01, "Optical flow frame 0 -> 1 (.flo)")->required();
  cmd->add_option("--flow10", o.flow10, "Optical flow frame 1 -> 0 (.flo)")->required();
  cmd->add_option("--mode", o.mode, "Correction model")->check(CLI::IsMember({"abmf", "geo"}));
  cmd->add_option("--gamma", o.gamma, "Readout time ratio in (0,1]");
  cmd->add_option("--mask", o.mask, "Occlusion mask model")->check(CLI::IsMember({"complement", "independent"}));
  cmd->add_option("--splat", o.splat, "Splatting weights")->check(CLI::IsMember({"sum", "softmax"}));
  cmd->add_option("--alpha", o.alpha, "Softmax importance scale");
}

Inputs load_inputs(const ReconstructOptions& o) {
  Inputs in{rsvr::read_image(o.rs0), rsvr::read_image(o.rs1), rsvr::read_flo(o.flow01), rsvr::read_flo(o.flow10),
            rsvr::ShutterSpec{}, {}};
  in.spec = rsvr::ShutterSpec(in.rs0.height(), o.gamma);
  in.cfg.bmf.mode = o.mode == "geo" ? rsvr::BmfMode::geo : rsvr::BmfMode::abmf;
  in.cfg.mask_mode = o.mask == "independent" ? rsvr::MaskMode::independent : rsvr::MaskMode::complement;
  in.cfg.splat.mode = o.splat == "sum" ? rsvr::SplatMode::sum : rsvr::SplatMode::softmax;
  in.cfg.splat.alpha = o.alpha;
  return in;
}

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw rsvr::RangeError("t out of [0,1]: " + std::to_string(t));
}

rsvr::ScalarMap valid_mask(const rsvr::ScalarMap& hole_mask) {
  rsvr::ScalarMap valid(hole_mask.width(), hole_mask.height());
  for (std::size_t i = 0; i < valid.data().size(); ++i) valid.data()[i] = 1.0f - hole_mask.data()[i];
  return valid;
}

void dump_intermediates(const rsvr::ReconstructionResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (int i = 0; i < 2; ++i) {
    const std::string k = std::to_string(i);
    rsvr::write_image(r.candidates[static_cast<std::size_t>(i)], dir / ("candidate_" + k + ".png"));
    rsvr::write_mask(r.masks[static_cast<std::size_t>(i)], dir / ("mask_" + k + ".png"));
    rsvr::write_flo(r.bmf[static_cast<std::size_t>(i)], dir / ("bmf_" + k + ".flo"));
  }
  rsvr::write_mask(r.hole_mask, dir / "hole_mask.png");
  rsvr::write_mask(valid_mask(r.hole_mask), dir / "valid_mask.png");
}

std::vector<double> parse_times(const std::string& list) {
  std::vector<double> times;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw rsvr::RangeError("invalid time value '" + item + "'");
    check_time(t);
    times.push_back(t);
  }
  if (times.empty()) throw rsvr::RangeError("empty time list");
  return times;
}

int cmd_simulate(const std::string& scene_path, const std::string& out, const std::string& times_list) {
  const rsvr::SceneDescription desc = rsvr::read_scene_spec(scene_path);
  const std::vector<double> times = parse_times(times_list);
  const fs::path dir(out);
  const bool existed = fs::exists(dir);
  try {
    const rsvr::Manifest m = rsvr::emit_dataset(desc.scene, desc.shutter, times, dir);
    std::cout << "simulate: wrote " << m.files.size() << " files and manifest.json to " << dir.string() << "\n";
  } catch (...) {
    std::error_code ec;
    if (existed) {
      for (const char* name : {"rs0.png", "rs1.png", "flow_01.flo", "flow_10.flo", "manifest.json"}) {
        fs::remove(dir / name, ec);
      }
      for (double t : times) fs::remove(dir / rsvr::gt_file_name(t), ec);
    } else {
      fs::remove_all(dir, ec);
    }
    throw;
  }
  return kExitOk;
}

int cmd_reconstruct(const ReconstructOptions& o, double t, const std::string& out, const std::string& dump) {
  check_time(t);
  const Inputs in = load_inputs(o);
  const rsvr::ReconstructionResult r = rsvr::reconstruct(in.rs0, in.rs1, in.f01, in.f10, t, in.spec, in.cfg);
  rsvr::write_image(r.frame, out);
  if (!dump.empty()) dump_intermediates(r, dump);
  std::cout << "reconstruct: t=" << rsvr::format_time(t) << " hole_fraction=" << rsvr::hole_fraction(r.hole_mask)
            << " -> " << out << "\n";
  return kExitOk;
}

int cmd_video(const ReconstructOptions& o, int steps, const std::string& out) {
  if (steps < 2) throw rsvr::RangeError("--steps must be at least 2");
  const Inputs in = load_inputs(o);
  std::vector<double> times;
  for (int k = 0; k < steps; ++k) times.push_back(static_cast<double>(k) / (steps - 1));
  const auto results = rsvr::reconstruct_sequence(in.rs0, in.rs1, in.f01, in.f10, times, in.spec, in.cfg);
  const fs::path dir(out);
  fs::create_directories(dir);
  std::vector<rsvr::VideoFrameEntry> entries;
  for (int k = 0; k < steps; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    const std::string name = "gs_" + std::to_string(k) + "_" + rsvr::format_time(r.t) + ".png";
    rsvr::write_image(r.frame, dir / name);
    entries.push_back({k, r.t, name, rsvr::hole_fraction(r.hole_mask)});
  }
  rsvr::write_text_file(dir / "video.json", rsvr::format_video_report(entries));
  std::cout << "video: wrote " << steps << " frames to " << dir.string() << "\n";
  return kExitOk;
}

bool is_image_file(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::optional<double> time_from_name(const std::string& stem) {
  static const std::regex pattern(R"(_([0-9]+(\.[0-9]+)?)$)");
  std::smatch m;
  if (!std::regex_search(stem, m, pattern)) return std::nullopt;
  const double t = std::stod(m[1].str());
  if (t < 0.0 || t > 1.0) return std::nullopt;
  return t;
}

rsvr::FrameMetrics evaluate_pair(const std::string& name, const fs::path& pred_path, const fs::path& gt_path,
                                 const std::optional<fs::path>& mask_path) {
  const rsvr::ImageBuffer pred = rsvr::read_image(pred_path);
  const rsvr::ImageBuffer gt = rsvr::read_image(gt_path);
  rsvr::FrameMetrics m;
  m.name = name;
  m.t = time_from_name(fs::path(name).stem().string());
  m.mse = rsvr::mean_squared_error(pred, gt);
  m.psnr_db = rsvr::psnr_from_mse(m.mse);
  m.ssim = rsvr::ssim(pred, gt);
  m.l1 = rsvr::l1_loss(pred, gt);
  if (mask_path) {
    const rsvr::ScalarMap mask = rsvr::read_mask(*mask_path);
    m.mse_masked = rsvr::mean_squared_error(pred, gt, mask);
    std::size_t excluded = 0;
    for (float v : mask.data()) excluded += v < 0.5f ? 1 : 0;
    m.hole_fraction = static_cast<double>(excluded) / static_cast<double>(mask.extent().pixels());
  } else {
    m.mse_masked = m.mse;
  }
  m.psnr_masked_db = rsvr::psnr_from_mse(m.mse_masked);
  return m;
}

std::set<std::string> image_names(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) names.insert(entry.path().filename().string());
  }
  return names;
}

int cmd_evaluate(const std::string& pred, const std::string& gt, const std::string& mask, const std::string& out) {
  rsvr::MetricsReport report;
  const std::optional<fs::path> mask_root = mask.empty() ? std::nullopt : std::optional<fs::path>(mask);
  if (fs::is_directory(pred) != fs::is_directory(gt)) {
    throw rsvr::IoError("--pred and --gt must both be files or both be directories");
  }
  if (!fs::is_directory(pred)) {
    report.entries.push_back(evaluate_pair(fs::path(pred).filename().string(), pred, gt, mask_root));
  } else {
    const auto pred_names = image_names(pred);
    const auto gt_names = image_names(gt);
    std::vector<std::string> unmatched;
    for (const auto& n : pred_names) {
      if (!gt_names.contains(n)) unmatched.push_back(fs::path(pred) / n);
    }
    for (const auto& n : gt_names) {
      if (!pred_names.contains(n)) unmatched.push_back(fs::path(gt) / n);
    }
    if (mask_root) {
      for (const auto& n : pred_names) {
        if (!fs::exists(*mask_root / n)) unmatched.push_back(*mask_root / n);
      }
    }
    if (!unmatched.empty()) {
      std::string msg = "unmatched files:";
      for (const auto& u : unmatched) msg += "\n  " + u;
      throw rsvr::IoError(msg);
    }
    if (pred_names.empty()) throw rsvr::IoError("no images found in " + pred);
    for (const auto& n : pred_names) {
      const auto m = mask_root ? std::optional<fs::path>(*mask_root / n) : std::nullopt;
      report.entries.push_back(evaluate_pair(n, fs::path(pred) / n, fs::path(gt) / n, m));
    }
    rsvr::FrameMetrics mean;
    mean.name = "mean";
    const double n = static_cast<double>(report.entries.size());
    for (const auto& e : report.entries) {
      mean.psnr_db += e.psnr_db / n;
      mean.psnr_masked_db += e.psnr_masked_db / n;
      mean.ssim += e.ssim / n;
      mean.l1 += e.l1 / n;
      mean.hole_fraction += e.hole_fraction / n;
      mean.mse += e.mse / n;
      mean.mse_masked += e.mse_masked / n;
    }
    report.mean = mean;
  }
  rsvr::write_report(report, out);
  const auto& head = report.mean ? *report.mean : report.entries.front();
  std::cout << "evaluate: " << report.entries.size() << " frame(s) psnr=" << head.psnr_db
            << " dB masked=" << head.psnr_masked_db << " dB ssim=" << head.ssim << " -> " << out << "\n";
  return kExitOk;
}

int cmd_analyze_flow(const std::string& flow_path, int height, const std::string& out) {
  if (height < 1) throw rsvr::RangeError("--height must be positive");
  const rsvr::FlowField flow = rsvr::read_flo(flow_path);
  const rsvr::FlowAnalysisReport report{flow_path, height, rsvr::vertical_ratio_stats(flow, height)};
  rsvr::write_text_file(out, rsvr::format_flow_analysis(report));
  std::cout << "analyze-flow: mean=" << report.stats.mean << " std=" << report.stats.std
            << " max=" << report.stats.max << " -> " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-shutter to global-shutter reconstruction toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  std::string scene, out, times = "0,0.5,1";
  auto* simulate = app.add_subcommand("simulate", "Render an RS dataset with ground truth");
  simulate->add_option("--scene", scene, "Scene description file")->required();
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--times", times, "Comma-separated GS times");

  ReconstructOptions ro;
  double t = 0.5;
  std::string dump;
  auto* reconstruct = app.add_subcommand("reconstruct", "Reconstruct one GS frame");
  add_reconstruct_inputs(reconstruct, ro);
  reconstruct->add_option("--t", t, "Target time in [0,1]")->required();
  reconstruct->add_option("--out", out, "Output image")->required();
  reconstruct->add_option("--dump-intermediates", dump, "Directory for candidates, masks and motion fields");

  int steps = 0;
  auto* video = app.add_subcommand("video", "Reconstruct N evenly spaced GS frames");
  add_reconstruct_inputs(video, ro);
  video->add_option("--steps", steps, "Number of frames (>= 2)")->required();
  video->add_option("--out", out, "Output directory")->required();

  std::string pred, gt, mask;
  auto* evaluate = app.add_subcommand("evaluate", "Compare predictions against ground truth");
  evaluate->add_option("--pred", pred, "Predicted image or directory")->required();
  evaluate->add_option("--gt", gt, "Ground-truth image or directory")->required();
  evaluate->add_option("--mask", mask, "Validity mask image or directory (1 = evaluate)");
  evaluate->add_option("--out", out, "Report path")->required();

  std::string flow;
  int height = 0;
  auto* analyze = app.add_subcommand("analyze-flow", "Vertical displacement ratio statistics");
  analyze->add_option("--flow", flow, "Flow file (.flo)")->required();
  analyze->add_option("--height", height, "Image height in rows")->required();
  analyze->add_option("--out", out, "Report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUser;
  }

  try {
    if (threads > 0) rsvr::set_num_threads(threads);
    if (*simulate) return cmd_simulate(scene, out, times);
    if (*reconstruct) return cmd_reconstruct(ro, t, out, dump);
    if (*video) return cmd_video(ro, steps, out);
    if (*evaluate) return cmd_evaluate(pred, gt, mask, out);
    if (*analyze) return cmd_analyze_flow(flow, height, out);
  } catch (const rsvr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
