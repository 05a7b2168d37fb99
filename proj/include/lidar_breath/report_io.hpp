// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_REPORT_IO_HPP
#define LIDAR_BREATH_REPORT_IO_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "lidar_breath/breath_signal.hpp"
#include "lidar_breath/error.hpp"
#include "lidar_breath/synth.hpp"
#include "lidar_breath/text.hpp"

namespace lidar_breath {

inline std::string format_roi(const Roi& roi) {
  using text::format_double;
  return format_double(roi.x_lo) + ',' + format_double(roi.x_hi) + ',' + format_double(roi.y_lo) + ',' +
         format_double(roi.y_hi) + ',' + format_double(roi.z_lo) + ',' + format_double(roi.z_hi);
}

/// Parses `x1,x2,y1,y2,z1,z2`; `inf` and `-inf` leave a side open.
inline Roi parse_roi(const std::string& text_bounds) {
  const auto fields = text::split(text_bounds, ',');
  if (fields.size() != 6) {
    throw Error(ErrorCode::InvalidRoi, "ROI needs six comma-separated bounds, got '" + text_bounds + "'");
  }
  double v[6];
  for (std::size_t i = 0; i < 6; ++i) {
    const auto parsed = text::parse_double(fields[i]);
    if (!parsed || std::isnan(*parsed)) {
      throw Error(ErrorCode::InvalidRoi, "ROI bound '" + std::string(fields[i]) + "' is not a number");
    }
    v[i] = *parsed;
  }
  Roi roi{v[0], v[1], v[2], v[3], v[4], v[5]};
  if (!roi.valid()) {
    throw Error(ErrorCode::InvalidRoi, "ROI lower bound exceeds upper bound in '" + text_bounds + "'");
  }
  return roi;
}

inline constexpr std::string_view kReportCsvHeader = "kind,start,end,amplitude,relative_depth,depth";

/// Configuration and summary values go into `# key=value` lines so the file
/// describes the run that produced it. Breath rows have start == end.
inline void write_report_csv(const BreathReport& r, std::ostream& out) {
  using text::format_double;
  const AnalysisConfig& c = r.config;
  out << "# ma_window=" << c.ma_window << '\n'
      << "# var_window=" << c.var_window << '\n'
      << "# gamma=" << format_double(c.hold_threshold) << '\n'
      << "# min_hold=" << format_double(c.min_hold_duration) << '\n'
      << "# projection=" << to_string(c.projection.axis) << '\n'
      << "# invert=" << (c.projection.polarity == Polarity::Inverted ? 1 : 0) << '\n'
      << "# roi=" << format_roi(c.roi) << '\n'
      << "# frames=" << r.total_frames << '\n'
      << "# sample_rate=" << format_double(r.sample_rate) << '\n'
      << "# tau=" << format_double(r.measurement_time) << '\n'
      << "# respiratory_rate=" << format_double(r.respiratory_rate) << '\n'
      << "# smoothed_mean=" << format_double(r.smoothed_mean) << '\n'
      << "# candidate_minima=" << r.candidate_minima << '\n'
      << "# empty_frames=" << r.empty_frames.size() << '\n'
      << kReportCsvHeader << '\n';
  for (std::size_t k = 0; k < r.breaths.frames.size(); ++k) {
    out << "breath," << r.breaths.frames[k] << ',' << r.breaths.frames[k] << ','
        << format_double(r.breaths.amplitudes[k]) << ','
        << (k < r.relative_depths.size() ? format_double(r.relative_depths[k]) : std::string()) << ','
        << (k < r.depths.size() ? format_double(r.depths[k]) : std::string()) << '\n';
  }
  for (const HoldEpisode& e : r.holds.episodes) {
    out << "hold," << e.start << ',' << e.end << ",,,\n";
  }
}

/// Restores what evaluation needs: events, depths, holds, rate and framing.
/// The trace is not stored in the report file.
inline BreathReport read_report_csv(std::istream& in, const std::string& source = "<stream>") {
  std::map<std::string, std::string> meta;
  std::size_t line_no = 0;
  const std::string header = detail::read_metadata(in, meta, line_no, source);
  if (header != kReportCsvHeader) {
    throw Error(ErrorCode::MalformedHeader, source + ":" + std::to_string(line_no) + ": expected header '" +
                                                std::string(kReportCsvHeader) + "'");
  }
  BreathReport r;
  r.total_frames = static_cast<std::size_t>(detail::meta_double(meta, "frames", source));
  r.sample_rate = detail::meta_double(meta, "sample_rate", source);
  r.measurement_time = detail::meta_double(meta, "tau", source);
  r.respiratory_rate = detail::meta_double(meta, "respiratory_rate", source);
  if (meta.count("smoothed_mean")) r.smoothed_mean = detail::meta_double(meta, "smoothed_mean", source);
  if (meta.count("ma_window")) r.config.ma_window = static_cast<std::size_t>(detail::meta_double(meta, "ma_window", source));
  if (meta.count("var_window")) r.config.var_window = static_cast<std::size_t>(detail::meta_double(meta, "var_window", source));
  if (meta.count("gamma")) r.config.hold_threshold = detail::meta_double(meta, "gamma", source);
  if (meta.count("min_hold")) r.config.min_hold_duration = detail::meta_double(meta, "min_hold", source);
  if (meta.count("projection")) r.config.projection.axis = parse_projection_axis(meta["projection"]);
  if (meta.count("invert") && meta["invert"] == "1") r.config.projection.polarity = Polarity::Inverted;
  if (meta.count("roi")) r.config.roi = parse_roi(meta["roi"]);

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto fields = text::split(text::trim(line), ',');
    if (fields.size() != 6) {
      throw Error(ErrorCode::MalformedRow, where + "expected 6 fields, got " + std::to_string(fields.size()));
    }
    const auto start = text::parse_uint(fields[1]);
    const auto end = text::parse_uint(fields[2]);
    if (!start || !end || *end < *start || *end >= r.total_frames) {
      throw Error(ErrorCode::MalformedRow, where + "bad frame range");
    }
    if (fields[0] == "breath") {
      const auto amplitude = text::parse_double(fields[3]);
      const auto relative = text::parse_double(fields[4]);
      const auto depth = text::parse_double(fields[5]);
      if (!amplitude || !relative || !depth || *start != *end) {
        throw Error(ErrorCode::MalformedRow, where + "breath rows need one frame and three numbers");
      }
      r.breaths.frames.push_back(static_cast<std::size_t>(*start));
      r.breaths.amplitudes.push_back(*amplitude);
      r.relative_depths.push_back(*relative);
      r.depths.push_back(*depth);
    } else if (fields[0] == "hold") {
      r.holds.episodes.push_back({static_cast<std::size_t>(*start), static_cast<std::size_t>(*end)});
      for (std::size_t f = *start; f <= *end; ++f) r.holds.frames.push_back(f);
    } else {
      throw Error(ErrorCode::MalformedRow, where + "kind must be 'breath' or 'hold'");
    }
  }
  std::sort(r.holds.frames.begin(), r.holds.frames.end());
  r.holds.frames.erase(std::unique(r.holds.frames.begin(), r.holds.frames.end()), r.holds.frames.end());
  return r;
}

inline constexpr std::string_view kSignalCsvHeader = "frame,raw,smoothed,variance,is_breath,is_hold";

inline void write_signal_csv(const BreathReport& r, std::ostream& out) {
  using text::format_double;
  const AnalysisTrace& t = r.trace;
  std::vector<bool> breath(t.raw.size(), false);
  std::vector<bool> hold(t.raw.size(), false);
  for (const std::size_t f : r.breaths.frames) if (f < breath.size()) breath[f] = true;
  for (const std::size_t f : r.holds.frames) if (f < hold.size()) hold[f] = true;
  out << kSignalCsvHeader << '\n';
  for (std::size_t n = 0; n < t.raw.size(); ++n) {
    out << n << ',' << format_double(t.raw[n]) << ',' << format_double(t.smoothed[n]) << ','
        << format_double(t.variance[n]) << ',' << (breath[n] ? 1 : 0) << ',' << (hold[n] ? 1 : 0) << '\n';
  }
}

/// Human-readable run summary.
inline void write_summary(const BreathReport& r, std::ostream& out) {
  char rate[64];
  std::snprintf(rate, sizeof(rate), "%.2f", r.respiratory_rate);
  out << "frames: " << r.total_frames << " (" << text::format_double(r.measurement_time) << " s)\n"
      << "breath events: " << r.breaths.frames.size() << '\n'
      << "respiratory rate: " << rate << " breaths/min\n"
      << "hold episodes: " << r.holds.episodes.size() << '\n';
  for (const HoldEpisode& e : r.holds.episodes) {
    out << "  frames " << e.start << "-" << e.end << '\n';
  }
  if (!r.empty_frames.empty()) {
    out << "frames emptied by the ROI: " << r.empty_frames.size() << '\n';
  }
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  writer(out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

inline BreathReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_report_csv(in, path.string());
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_REPORT_IO_HPP
