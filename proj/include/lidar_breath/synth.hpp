// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_SYNTH_HPP
#define LIDAR_BREATH_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lidar_breath/breath_signal.hpp"
#include "lidar_breath/error.hpp"
#include "lidar_breath/pointcloud.hpp"
#include "lidar_breath/text.hpp"

namespace lidar_breath {

enum class Scenario { FrontSeated, RearSeated, RightSide, LeftSide, SupineOverhead };

/// Placement of the torso patch relative to the sensor. The patch centre sits
/// at `distance * toward_subject`; the chest moves along -toward_subject.
struct ScenarioGeometry {
  Point3 toward_subject;
  Point3 across;  // patch width direction
  Point3 up;      // patch height direction
  double attenuation = 1.0;
  ProjectionAxis axis = ProjectionAxis::Y;
};

inline ScenarioGeometry geometry(Scenario s) {
  switch (s) {
    case Scenario::FrontSeated: return {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, 1.0, ProjectionAxis::Y};
    case Scenario::RearSeated: return {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, 0.3, ProjectionAxis::Y};
    case Scenario::RightSide: return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 0.6, ProjectionAxis::X};
    // Same side of the sensor as RightSide, subject turned around.
    case Scenario::LeftSide: return {{1, 0, 0}, {0, -1, 0}, {0, 0, 1}, 0.6, ProjectionAxis::X};
    // Sensor hung upside down above the bed, so the subject lies along +z.
    case Scenario::SupineOverhead: return {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, 1.0, ProjectionAxis::Z};
  }
  return {};
}

inline ProjectionMode preferred_projection(Scenario s) { return {geometry(s).axis, Polarity::Normal}; }

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::FrontSeated: return "front-seated";
    case Scenario::RearSeated: return "rear-seated";
    case Scenario::RightSide: return "right-side";
    case Scenario::LeftSide: return "left-side";
    case Scenario::SupineOverhead: return "supine-overhead";
  }
  return "front-seated";
}

/// Accepts the letters a-e or the names produced by to_string.
inline Scenario parse_scenario(const std::string& name) {
  static const std::map<std::string, Scenario> kNames = {
      {"a", Scenario::FrontSeated},    {"front-seated", Scenario::FrontSeated},
      {"b", Scenario::RearSeated},     {"rear-seated", Scenario::RearSeated},
      {"c", Scenario::RightSide},      {"right-side", Scenario::RightSide},
      {"d", Scenario::LeftSide},       {"left-side", Scenario::LeftSide},
      {"e", Scenario::SupineOverhead}, {"supine-overhead", Scenario::SupineOverhead},
  };
  const auto it = kNames.find(name);
  if (it == kNames.end()) {
    throw Error(ErrorCode::InvalidConfig, "unknown scenario '" + name + "' (expected a-e or a scenario name)");
  }
  return it->second;
}

struct SynthConfig {
  Scenario scenario = Scenario::FrontSeated;
  std::size_t sets = 3;
  std::size_t breaths_per_set = 5;
  double breath_period = 5.0;     // s
  double hold_duration = 10.0;    // s
  double amplitude = 0.005;       // m
  double noise_sigma = 0.0;       // m, per point and axis
  double frame_rate = 10.0;       // Hz
  double sensor_distance = 2.0;   // m
  std::size_t torso_columns = 20;
  std::size_t torso_rows = 15;
  double torso_width = 0.30;      // m
  double torso_height = 0.40;     // m
  double torso_bulge = 0.03;      // m, ellipsoidal curvature toward the sensor
  std::uint64_t seed = 1;

  double set_length() const noexcept { return static_cast<double>(breaths_per_set) * breath_period; }
  double set_start(std::size_t s) const noexcept { return static_cast<double>(s) * (set_length() + hold_duration); }
  double schedule_duration() const noexcept {
    return static_cast<double>(sets) * set_length() + static_cast<double>(sets - 1) * hold_duration;
  }
};

inline void validate(const SynthConfig& c) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (c.sets < 1 || c.breaths_per_set < 1 || c.torso_columns < 1 || c.torso_rows < 1) {
    throw Error(ErrorCode::InvalidConfig, "set, breath and torso grid counts must be at least 1");
  }
  if (!positive(c.breath_period) || !positive(c.hold_duration) || !positive(c.amplitude) ||
      !positive(c.frame_rate) || !positive(c.sensor_distance) || !positive(c.torso_width) ||
      !positive(c.torso_height)) {
    throw Error(ErrorCode::InvalidConfig, "durations, amplitude, rate, distance and torso extent must be positive");
  }
  if (!std::isfinite(c.noise_sigma) || c.noise_sigma < 0.0 || !std::isfinite(c.torso_bulge) || c.torso_bulge < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "noise sigma and torso bulge must be non-negative");
  }
}

/// Chest displacement at time t: raised cosine inside each set, zero during holds.
inline double displacement_profile(double t, const SynthConfig& c) {
  const double tau = c.schedule_duration();
  if (!(t >= 0.0) || t > tau) {
    throw Error(ErrorCode::OutOfRange, "t = " + text::format_double(t) + " outside [0, " + text::format_double(tau) + "]");
  }
  for (std::size_t s = 0; s < c.sets; ++s) {
    const double local = t - c.set_start(s);
    if (local >= 0.0 && local <= c.set_length()) {
      return c.amplitude * (1.0 - std::cos(2.0 * std::numbers::pi * local / c.breath_period)) / 2.0;
    }
  }
  return 0.0;
}

struct GroundTruth {
  std::vector<std::size_t> breath_event_frames;  // one per simulated inhalation peak
  std::vector<std::size_t> hold_frames;          // sorted
  std::vector<HoldEpisode> hold_episodes;
  double true_rate = 0.0;   // breaths per minute
  double true_depth = 0.0;  // m, observable chest excursion
  double tau = 0.0;         // s, first to last frame
  std::size_t total_frames = 0;
  double sample_rate = 10.0;
};

namespace detail {

inline std::vector<HoldEpisode> episodes_of(const std::vector<std::size_t>& sorted_frames) {
  std::vector<HoldEpisode> episodes;
  for (const std::size_t f : sorted_frames) {
    if (!episodes.empty() && episodes.back().end + 1 == f) {
      episodes.back().end = f;
    } else {
      episodes.push_back({f, f});
    }
  }
  return episodes;
}

}  // namespace detail

struct Scene {
  FrameSequence frames;
  GroundTruth truth;
};

/// Builds the torso point sequence and its labels. Breath events sit at the
/// inhalation peaks (mid-period), where the chest is closest to the sensor and
/// the projected signal has its troughs. Hold frames are those with t in
/// (set end, next set start].
inline Scene generate_scene(const SynthConfig& c) {
  validate(c);
  const ScenarioGeometry g = geometry(c.scenario);
  const double tau_nominal = c.schedule_duration();
  const auto frame_count = static_cast<std::size_t>(std::llround(tau_nominal * c.frame_rate)) + 1;

  // Rest shape of the patch, centred on the subject direction.
  std::vector<Point3> rest;
  rest.reserve(c.torso_columns * c.torso_rows);
  for (std::size_t r = 0; r < c.torso_rows; ++r) {
    for (std::size_t k = 0; k < c.torso_columns; ++k) {
      const double a = c.torso_columns == 1 ? 0.0 : (static_cast<double>(k) / static_cast<double>(c.torso_columns - 1) - 0.5);
      const double b = c.torso_rows == 1 ? 0.0 : (static_cast<double>(r) / static_cast<double>(c.torso_rows - 1) - 0.5);
      const double bulge = c.torso_bulge * std::sqrt(std::max(0.0, 1.0 - 2.0 * (a * a + b * b)));
      const double along = c.sensor_distance - bulge;
      const double w = a * c.torso_width;
      const double h = b * c.torso_height;
      rest.push_back({along * g.toward_subject.x + w * g.across.x + h * g.up.x,
                      along * g.toward_subject.y + w * g.across.y + h * g.up.y,
                      along * g.toward_subject.z + w * g.across.z + h * g.up.z});
    }
  }

  Scene scene;
  scene.frames.nominal_rate = c.frame_rate;
  scene.frames.frames.resize(frame_count);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t n = 0; n < frame_count; ++n) {
    PointFrame& frame = scene.frames.frames[n];
    frame.index = n;
    frame.timestamp = static_cast<double>(n) / c.frame_rate;
    const double shift = g.attenuation * displacement_profile(std::min(frame.timestamp, tau_nominal), c);
    frame.points.reserve(rest.size());
    for (const Point3& p : rest) {
      Point3 q{p.x - shift * g.toward_subject.x, p.y - shift * g.toward_subject.y, p.z - shift * g.toward_subject.z};
      if (c.noise_sigma > 0.0) {
        q.x += c.noise_sigma * noise(rng);
        q.y += c.noise_sigma * noise(rng);
        q.z += c.noise_sigma * noise(rng);
      }
      frame.points.push_back(q);
    }
  }

  GroundTruth& truth = scene.truth;
  for (std::size_t s = 0; s < c.sets; ++s) {
    for (std::size_t k = 0; k < c.breaths_per_set; ++k) {
      const double peak = c.set_start(s) + (static_cast<double>(k) + 0.5) * c.breath_period;
      truth.breath_event_frames.push_back(static_cast<std::size_t>(std::llround(peak * c.frame_rate)));
    }
  }
  for (std::size_t n = 0; n < frame_count; ++n) {
    const double t = scene.frames.frames[n].timestamp;
    const double eps = 1e-9 * std::max(1.0, t);
    for (std::size_t s = 0; s + 1 < c.sets; ++s) {
      const double set_end = c.set_start(s) + c.set_length();
      if (t > set_end + eps && t <= set_end + c.hold_duration + eps) {
        truth.hold_frames.push_back(n);
        break;
      }
    }
  }
  truth.hold_episodes = detail::episodes_of(truth.hold_frames);
  truth.tau = scene.frames.frames.back().timestamp - scene.frames.frames.front().timestamp;
  truth.true_rate = respiratory_rate(truth.breath_event_frames.size(), truth.tau);
  truth.true_depth = c.amplitude * g.attenuation;
  truth.total_frames = frame_count;
  truth.sample_rate = c.frame_rate;
  return scene;
}

inline void write_truth_csv(const GroundTruth& truth, std::ostream& out) {
  out << "# true_rate=" << text::format_double(truth.true_rate) << '\n'
      << "# true_depth=" << text::format_double(truth.true_depth) << '\n'
      << "# tau=" << text::format_double(truth.tau) << '\n'
      << "# frames=" << truth.total_frames << '\n'
      << "# sample_rate=" << text::format_double(truth.sample_rate) << '\n'
      << "kind,frame\n";
  for (const std::size_t f : truth.breath_event_frames) out << "breath," << f << '\n';
  for (const std::size_t f : truth.hold_frames) out << "hold," << f << '\n';
}

namespace detail {

/// Reads leading `# key=value` lines into `meta`; returns the first other line.
inline std::string read_metadata(std::istream& in, std::map<std::string, std::string>& meta, std::size_t& line_no,
                                 const std::string& source) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = text::trim(line);
    if (view.empty()) continue;
    if (view.front() != '#') return std::string(view);
    const std::string_view body = text::trim(view.substr(1));
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedHeader, source + ":" + std::to_string(line_no) + ": expected '# key=value'");
    }
    meta[std::string(text::trim(body.substr(0, eq)))] = std::string(text::trim(body.substr(eq + 1)));
  }
  return {};
}

inline double meta_double(const std::map<std::string, std::string>& meta, const std::string& key,
                          const std::string& source) {
  const auto it = meta.find(key);
  if (it == meta.end()) {
    throw Error(ErrorCode::MalformedHeader, source + ": missing metadata '" + key + "'");
  }
  const auto v = text::parse_double(it->second);
  if (!v) {
    throw Error(ErrorCode::MalformedHeader, source + ": metadata '" + key + "' is not a number");
  }
  return *v;
}

}  // namespace detail

inline GroundTruth read_truth_csv(std::istream& in, const std::string& source = "<stream>") {
  std::map<std::string, std::string> meta;
  std::size_t line_no = 0;
  const std::string header = detail::read_metadata(in, meta, line_no, source);
  if (header != "kind,frame") {
    throw Error(ErrorCode::MalformedHeader, source + ":" + std::to_string(line_no) + ": expected header 'kind,frame'");
  }
  GroundTruth truth;
  truth.true_rate = detail::meta_double(meta, "true_rate", source);
  truth.true_depth = detail::meta_double(meta, "true_depth", source);
  truth.tau = detail::meta_double(meta, "tau", source);
  truth.total_frames = static_cast<std::size_t>(detail::meta_double(meta, "frames", source));
  truth.sample_rate = meta.count("sample_rate") ? detail::meta_double(meta, "sample_rate", source) : 10.0;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto fields = text::split(text::trim(line), ',');
    const auto frame = fields.size() == 2 ? text::parse_uint(fields[1]) : std::nullopt;
    if (!frame) {
      throw Error(ErrorCode::MalformedRow, where + "expected 'kind,frame'");
    }
    if (fields[0] == "breath") {
      truth.breath_event_frames.push_back(static_cast<std::size_t>(*frame));
    } else if (fields[0] == "hold") {
      truth.hold_frames.push_back(static_cast<std::size_t>(*frame));
    } else {
      throw Error(ErrorCode::MalformedRow, where + "kind must be 'breath' or 'hold'");
    }
  }
  std::sort(truth.breath_event_frames.begin(), truth.breath_event_frames.end());
  std::sort(truth.hold_frames.begin(), truth.hold_frames.end());
  truth.hold_frames.erase(std::unique(truth.hold_frames.begin(), truth.hold_frames.end()), truth.hold_frames.end());
  truth.hold_episodes = detail::episodes_of(truth.hold_frames);
  return truth;
}

inline void write_truth_csv(const GroundTruth& truth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_truth_csv(truth, out);
}

inline GroundTruth read_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_truth_csv(in, path.string());
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_SYNTH_HPP
