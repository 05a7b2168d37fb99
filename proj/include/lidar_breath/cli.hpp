// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_CLI_HPP
#define LIDAR_BREATH_CLI_HPP

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lidar_breath/breath_signal.hpp"
#include "lidar_breath/error.hpp"
#include "lidar_breath/frame_csv.hpp"
#include "lidar_breath/metrics.hpp"
#include "lidar_breath/report_io.hpp"
#include "lidar_breath/synth.hpp"
#include "lidar_breath/vlp16.hpp"

namespace lidar_breath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

/// Thrown for flag values that parse but make no sense; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline bool is_csv(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".csv";
}

/// Frame CSV by extension, otherwise a raw packet file.
inline FrameSequence load_frames(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::Io, "input file not found: " + path.string());
  }
  if (is_csv(path)) {
    return read_frames_csv(path);
  }
  const std::vector<vlp16::Packet> packets = vlp16::read_packet_file(path);
  try {
    return vlp16::assemble_frames(packets);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  }
}

struct SynthFlags {
  std::string scenario = "a";
  SynthConfig config;
  std::string out = ".";
};

struct AnalyzeFlags {
  std::string input;
  std::string roi;
  std::string projection = "mean";
  bool invert = false;
  std::size_t ma_window = 10;
  std::size_t var_window = 25;
  double gamma = 1e-6;
  double min_hold = 2.0;
  std::optional<double> frame_rate;
  std::string out = ".";
};

struct EvaluateFlags {
  std::string report;
  std::string truth;
  std::optional<std::size_t> tolerance_frames;
  std::string scenario = "unknown";
  std::optional<std::string> out;
};

struct ConvertFlags {
  std::string input;
  std::string output;
  std::optional<double> frame_rate;
};

inline int run_synth(const SynthFlags& f, std::ostream& out) {
  SynthConfig config = f.config;
  try {
    config.scenario = parse_scenario(f.scenario);
    validate(config);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Scene scene = generate_scene(config);
  const std::filesystem::path dir(f.out);
  ensure_directory(dir);
  write_frames_csv(scene.frames, dir / "frames.csv");
  write_truth_csv(scene.truth, dir / "truth.csv");
  out << "scenario: " << to_string(config.scenario) << '\n'
      << "frames: " << scene.truth.total_frames << '\n'
      << "breath events: " << scene.truth.breath_event_frames.size() << '\n'
      << "hold frames: " << scene.truth.hold_frames.size() << '\n'
      << "true rate: " << two_decimals(scene.truth.true_rate) << " breaths/min\n"
      << "wrote " << (dir / "frames.csv").string() << " and " << (dir / "truth.csv").string() << '\n';
  return kExitOk;
}

inline int run_analyze(const AnalyzeFlags& f, std::ostream& out) {
  AnalysisConfig config;
  try {
    config.ma_window = f.ma_window;
    config.var_window = f.var_window;
    config.hold_threshold = f.gamma;
    config.min_hold_duration = f.min_hold;
    config.projection.axis = parse_projection_axis(f.projection);
    config.projection.polarity = f.invert ? Polarity::Inverted : Polarity::Normal;
    if (!f.roi.empty()) config.roi = parse_roi(f.roi);
    validate(config);
    if (f.frame_rate && !(*f.frame_rate > 0.0 && std::isfinite(*f.frame_rate))) {
      throw Error(ErrorCode::InvalidConfig, "--frame-rate must be positive");
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  FrameSequence frames = load_frames(f.input);
  if (f.frame_rate) frames.nominal_rate = *f.frame_rate;
  BreathReport report;
  try {
    report = analyze(frames, config);
  } catch (const Error& e) {
    throw Error(e.code(), f.input + ": " + e.what());
  }
  const std::filesystem::path dir(f.out);
  ensure_directory(dir);
  write_file(dir / "report.csv", [&](std::ostream& o) { write_report_csv(report, o); });
  write_file(dir / "signal.csv", [&](std::ostream& o) { write_signal_csv(report, o); });
  write_summary(report, out);
  out << "breath event frames:";
  for (const std::size_t frame : report.breaths.frames) out << ' ' << frame;
  out << '\n' << "wrote " << (dir / "report.csv").string() << " and " << (dir / "signal.csv").string() << '\n';
  return kExitOk;
}

inline int run_evaluate(const EvaluateFlags& f, std::ostream& out) {
  const BreathReport report = read_report_csv(std::filesystem::path(f.report));
  const GroundTruth truth = read_truth_csv(std::filesystem::path(f.truth));
  // One second of frames unless overridden.
  const std::size_t tol = f.tolerance_frames.value_or(static_cast<std::size_t>(std::llround(report.sample_rate)));
  const EvalResult result = evaluate(report, truth, tol);
  out << "breathing accuracy: " << two_decimals(result.breathing_accuracy) << '\n'
      << "hold accuracy: " << two_decimals(result.hold_accuracy) << '\n'
      << "depth RMSE: " << (result.depth_rmse ? text::format_double(*result.depth_rmse) + " m" : std::string("n/a"))
      << '\n'
      << "rate RMSE: " << text::format_double(result.rate_rmse) << " breaths/min\n";
  if (f.out) {
    const std::filesystem::path dir(*f.out);
    ensure_directory(dir);
    write_file(dir / "eval.csv", [&](std::ostream& o) { write_eval_csv(result, f.scenario, o); });
    write_file(dir / "eval.txt", [&](std::ostream& o) { write_eval_text(result, f.scenario, o); });
  }
  return kExitOk;
}

inline int run_convert(const ConvertFlags& f, std::ostream& out) {
  if (f.frame_rate && !(*f.frame_rate > 0.0 && std::isfinite(*f.frame_rate))) {
    throw UsageError("--frame-rate must be positive");
  }
  if (!std::filesystem::exists(f.input)) {
    throw Error(ErrorCode::Io, "input file not found: " + f.input);
  }
  const std::vector<vlp16::Packet> packets = vlp16::read_packet_file(f.input);
  FrameSequence frames;
  try {
    frames = vlp16::assemble_frames(packets);
  } catch (const Error& e) {
    throw Error(e.code(), f.input + ": " + e.what());
  }
  if (f.frame_rate) frames.nominal_rate = *f.frame_rate;
  write_frames_csv(frames, std::filesystem::path(f.output));
  out << "packets: " << packets.size() << "\nframes: " << frames.size() << "\nwrote " << f.output << '\n';
  return kExitOk;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name. Returns 0 on
/// success, 1 on usage errors and 2 on data or I/O errors.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contactless breathing and breath-hold analysis from LiDAR point clouds", "lidar_breath"};
  app.require_subcommand(1, 1);

  detail::SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic torso scene with ground truth");
  synth_cmd->add_option("--scenario", synth.scenario, "a-e or front-seated, rear-seated, right-side, left-side, supine-overhead")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed, "Noise seed")->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise_sigma, "Per-point Gaussian noise sigma (m)")->capture_default_str();
  synth_cmd->add_option("--sets", synth.config.sets, "Breathing sets")->capture_default_str();
  synth_cmd->add_option("--breaths", synth.config.breaths_per_set, "Breaths per set")->capture_default_str();
  synth_cmd->add_option("--period", synth.config.breath_period, "Breath period (s)")->capture_default_str();
  synth_cmd->add_option("--hold", synth.config.hold_duration, "Hold duration between sets (s)")->capture_default_str();
  synth_cmd->add_option("--amplitude", synth.config.amplitude, "Chest displacement amplitude (m)")->capture_default_str();
  synth_cmd->add_option("--frame-rate", synth.config.frame_rate, "Frame rate (Hz)")->capture_default_str();
  synth_cmd->add_option("--distance", synth.config.sensor_distance, "Sensor to torso distance (m)")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output directory for frames.csv and truth.csv")->capture_default_str();

  detail::AnalyzeFlags analyze_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "Detect breaths and holds in a frame CSV or packet file");
  analyze_cmd->add_option("input", analyze_flags.input, "Frame CSV (.csv) or raw VLP-16 packet file")->required();
  analyze_cmd->add_option("--roi", analyze_flags.roi, "Torso box x1,x2,y1,y2,z1,z2 in meters");
  analyze_cmd->add_option("--projection", analyze_flags.projection, "x, y, z or mean")->capture_default_str();
  analyze_cmd->add_flag("--invert", analyze_flags.invert, "Negate the projected signal");
  analyze_cmd->add_option("--ma-window", analyze_flags.ma_window, "Moving average window (frames)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  analyze_cmd->add_option("--var-window", analyze_flags.var_window, "Moving variance window (frames)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  analyze_cmd->add_option("--gamma", analyze_flags.gamma, "Hold variance threshold (m^2)")->capture_default_str();
  analyze_cmd->add_option("--min-hold", analyze_flags.min_hold, "Shortest reported hold (s)")->capture_default_str();
  analyze_cmd->add_option("--frame-rate", analyze_flags.frame_rate, "Override the inferred frame rate (Hz)");
  analyze_cmd->add_option("--out", analyze_flags.out, "Output directory for report.csv and signal.csv")
      ->capture_default_str();

  detail::EvaluateFlags evaluate_flags;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a report against ground truth");
  evaluate_cmd->add_option("report", evaluate_flags.report, "report.csv from analyze")->required();
  evaluate_cmd->add_option("truth", evaluate_flags.truth, "truth.csv from synth")->required();
  evaluate_cmd->add_option("--tolerance-frames", evaluate_flags.tolerance_frames,
                           "Event matching tolerance (default: one second of frames)");
  evaluate_cmd->add_option("--scenario", evaluate_flags.scenario, "Label for the eval.csv row")->capture_default_str();
  evaluate_cmd->add_option("--out", evaluate_flags.out, "Output directory for eval.csv and eval.txt");

  detail::ConvertFlags convert_flags;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a raw packet file to frame CSV");
  convert_cmd->add_option("input", convert_flags.input, "Concatenated 1206-byte VLP-16 payloads")->required();
  convert_cmd->add_option("output", convert_flags.output, "Frame CSV to write")->required();
  convert_cmd->add_option("--frame-rate", convert_flags.frame_rate, "Override the inferred frame rate (Hz)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) return detail::run_synth(synth, out);
    if (*analyze_cmd) return detail::run_analyze(analyze_flags, out);
    if (*evaluate_cmd) return detail::run_evaluate(evaluate_flags, out);
    if (*convert_cmd) return detail::run_convert(convert_flags, out);
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lidar_breath::cli

#endif  // LIDAR_BREATH_CLI_HPP
