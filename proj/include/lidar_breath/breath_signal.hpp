// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_BREATH_SIGNAL_HPP
#define LIDAR_BREATH_BREATH_SIGNAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lidar_breath/error.hpp"
#include "lidar_breath/pointcloud.hpp"
#include "lidar_breath/series.hpp"

namespace lidar_breath {

/// Detected troughs: sample positions and the smoothed value at each.
struct PeakSet {
  std::vector<std::size_t> frames;
  std::vector<double> amplitudes;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
};

/// Inclusive frame interval.
struct HoldEpisode {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const HoldEpisode&, const HoldEpisode&) = default;
};

struct HoldSet {
  std::vector<std::size_t> frames;  // sorted union of the episodes
  std::vector<HoldEpisode> episodes;

  bool empty() const noexcept { return episodes.empty(); }
};

struct AnalysisConfig {
  std::size_t ma_window = 10;       // M
  std::size_t var_window = 25;      // W
  double hold_threshold = 1e-6;     // gamma, m^2
  double min_hold_duration = 2.0;   // seconds; 0 disables the filter
  ProjectionMode projection{};
  Roi roi = Roi::unbounded();
};

inline void validate(const AnalysisConfig& config) {
  if (config.ma_window < 1) {
    throw Error(ErrorCode::InvalidWindow, "moving-average window must be >= 1");
  }
  if (config.var_window < 1) {
    throw Error(ErrorCode::InvalidWindow, "moving-variance window must be >= 1");
  }
  if (!(config.hold_threshold > 0.0) || !std::isfinite(config.hold_threshold)) {
    throw Error(ErrorCode::InvalidConfig, "hold threshold must be positive");
  }
  if (!(config.min_hold_duration >= 0.0) || !std::isfinite(config.min_hold_duration)) {
    throw Error(ErrorCode::InvalidConfig, "minimum hold duration must be >= 0");
  }
  if (!config.roi.valid()) {
    throw Error(ErrorCode::InvalidRoi, "ROI lower bound exceeds upper bound");
  }
}

/// Causal moving average. Sample n averages positions max(0, n-M+1)..n, so
/// the first M-1 outputs use the partial window that is available.
inline BreathSignal moving_average(const BreathSignal& signal, std::size_t window) {
  if (window < 1) {
    throw Error(ErrorCode::InvalidWindow, "moving-average window must be >= 1");
  }
  BreathSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.resize(signal.size());
  for (std::size_t n = 0; n < signal.size(); ++n) {
    const std::size_t first = n + 1 >= window ? n + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= n; ++k) {
      sum += signal.samples[k];
    }
    out.samples[n] = sum / static_cast<double>(n - first + 1);
  }
  return out;
}

/// Interior local minima of the smoothed signal. A flat run strictly below
/// both flanks reports its first position; endpoints never qualify.
inline PeakSet detect_local_minima(const BreathSignal& smoothed) {
  const std::vector<double>& y = smoothed.samples;
  if (y.size() < 3) {
    throw Error(ErrorCode::TooShort, "need at least 3 samples to find local minima, got " + std::to_string(y.size()));
  }
  PeakSet peaks;
  std::size_t i = 1;
  while (i + 1 < y.size()) {
    if (!(y[i - 1] > y[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end + 1 < y.size() && y[run_end + 1] == y[i]) {
      ++run_end;
    }
    if (run_end + 1 < y.size() && y[run_end + 1] > y[i]) {
      peaks.frames.push_back(i);
      peaks.amplitudes.push_back(y[i]);
    }
    i = run_end + 1;
  }
  return peaks;
}

inline double signal_mean(const BreathSignal& signal) {
  if (signal.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot average an empty signal");
  }
  double sum = 0.0;
  for (double v : signal.samples) {
    sum += v;
  }
  return sum / static_cast<double>(signal.size());
}

/// Keeps the troughs at or below the global mean of the smoothed signal.
inline PeakSet filter_peaks_below_mean(const PeakSet& peaks, const BreathSignal& smoothed) {
  PeakSet kept;
  if (peaks.empty()) {
    return kept;
  }
  const double mean = signal_mean(smoothed);
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    if (peaks.frames[k] >= smoothed.size()) {
      throw Error(ErrorCode::OutOfRange, "peak frame " + std::to_string(peaks.frames[k]) + " outside the signal");
    }
    if (peaks.amplitudes[k] <= mean) {
      kept.frames.push_back(peaks.frames[k]);
      kept.amplitudes.push_back(peaks.amplitudes[k]);
    }
  }
  return kept;
}

/// Breaths per minute over a measurement of `duration` seconds.
inline double respiratory_rate(std::size_t event_count, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::InvalidDuration, "measurement time must be positive");
  }
  // 60 * count is exact, so the single division is the correctly rounded rate.
  return (60.0 * static_cast<double>(event_count)) / duration;
}

inline double respiratory_rate(const PeakSet& events, double duration) {
  return respiratory_rate(events.size(), duration);
}

/// Centered moving variance with the window [n - (W-1)/2, n + W/2] clamped
/// to the signal. Sample variance (divisor count - 1); one-sample windows give 0.
/// Two passes over values shifted by the window's first sample, so a flat
/// window yields exactly zero.
inline std::vector<double> moving_variance(const BreathSignal& smoothed, std::size_t window) {
  if (window < 1) {
    throw Error(ErrorCode::InvalidWindow, "moving-variance window must be >= 1");
  }
  const std::vector<double>& y = smoothed.samples;
  const std::size_t count = y.size();
  const std::size_t back = (window - 1) / 2;
  const std::size_t ahead = window / 2;
  std::vector<double> out(count, 0.0);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t lo = n >= back ? n - back : 0;
    const std::size_t hi = std::min(count - 1, n + ahead);
    const std::size_t len = hi - lo + 1;
    if (len < 2) {
      continue;
    }
    const double pivot = y[lo];
    double mean = 0.0;
    for (std::size_t u = lo; u <= hi; ++u) {
      mean += y[u] - pivot;
    }
    mean /= static_cast<double>(len);
    double ss = 0.0;
    for (std::size_t u = lo; u <= hi; ++u) {
      const double d = (y[u] - pivot) - mean;
      ss += d * d;
    }
    out[n] = ss / static_cast<double>(len - 1);
  }
  return out;
}

namespace detail {

inline std::vector<HoldEpisode> runs_of(const std::vector<bool>& flags) {
  std::vector<HoldEpisode> runs;
  std::size_t i = 0;
  while (i < flags.size()) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < flags.size() && flags[j + 1]) {
      ++j;
    }
    runs.push_back({i, j});
    i = j + 1;
  }
  return runs;
}

}  // namespace detail

/// Frames whose moving variance is at or below `threshold`, merged into
/// episodes. Episodes shorter than `min_duration` seconds are dropped, then
/// breath-event frames are carved out so holds and breaths never share a frame.
inline HoldSet detect_holds(std::span<const double> variance, double threshold, double min_duration,
                            double sample_rate, const PeakSet& breath_frames) {
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "hold threshold must be positive");
  }
  if (!(min_duration >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "minimum hold duration must be >= 0");
  }
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
  }
  std::vector<bool> flagged(variance.size(), false);
  for (std::size_t n = 0; n < variance.size(); ++n) {
    flagged[n] = variance[n] <= threshold;
  }
  std::vector<bool> kept(variance.size(), false);
  for (const HoldEpisode& ep : detail::runs_of(flagged)) {
    if (static_cast<double>(ep.length()) / sample_rate >= min_duration) {
      for (std::size_t n = ep.start; n <= ep.end; ++n) {
        kept[n] = true;
      }
    }
  }
  for (std::size_t frame : breath_frames.frames) {
    if (frame < kept.size()) {
      kept[frame] = false;
    }
  }
  HoldSet holds;
  holds.episodes = detail::runs_of(kept);
  for (const HoldEpisode& ep : holds.episodes) {
    for (std::size_t n = ep.start; n <= ep.end; ++n) {
      holds.frames.push_back(n);
    }
  }
  return holds;
}

/// Per-event breath depth: the largest raw value since the previous event
/// minus the smallest raw value inside the event's smoothing window
/// [n - M + 1, n]. This is the peak-to-trough excursion of the breath that
/// ends at the event, in the projected signal's units.
inline std::vector<double> cycle_depths(const BreathSignal& raw, const PeakSet& events, std::size_t ma_window) {
  std::vector<double> depths;
  depths.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    const std::size_t n = events.frames[k];
    if (n >= raw.size()) {
      throw Error(ErrorCode::OutOfRange, "event frame " + std::to_string(n) + " outside the signal");
    }
    const std::size_t cycle_start = k == 0 ? 0 : events.frames[k - 1] + 1;
    const std::size_t trough_start = n + 1 >= ma_window ? n + 1 - ma_window : 0;
    const auto first = raw.samples.begin();
    const double crest = *std::max_element(first + static_cast<std::ptrdiff_t>(cycle_start),
                                           first + static_cast<std::ptrdiff_t>(n) + 1);
    const double trough = *std::min_element(first + static_cast<std::ptrdiff_t>(trough_start),
                                            first + static_cast<std::ptrdiff_t>(n) + 1);
    depths.push_back(crest - trough);
  }
  return depths;
}

struct AnalysisTrace {
  BreathSignal raw;
  BreathSignal smoothed;
  std::vector<double> variance;
};

struct BreathReport {
  PeakSet breaths;                     // filtered troughs, amplitude = smoothed value
  std::vector<double> relative_depths; // global smoothed mean - amplitude
  std::vector<double> depths;          // cycle peak-to-trough excursion
  HoldSet holds;
  double respiratory_rate = 0.0;       // breaths per minute
  double measurement_time = 0.0;       // seconds
  std::size_t total_frames = 0;
  double sample_rate = 0.0;
  double smoothed_mean = 0.0;
  std::size_t candidate_minima = 0;    // before the below-mean filter
  std::vector<std::size_t> empty_frames;
  AnalysisConfig config;
  AnalysisTrace trace;
};

/// Full chain: ROI filter, centroid, projection, smoothing, trough detection,
/// below-mean filtering, rate, moving variance and hold detection.
inline BreathReport analyze(const FrameSequence& frames, const AnalysisConfig& config) {
  validate(config);
  const std::size_t needed = std::max({config.ma_window, config.var_window, std::size_t{3}});
  if (frames.size() < needed) {
    throw Error(ErrorCode::TooFewFrames, "need at least " + std::to_string(needed) + " frames, got " +
                                             std::to_string(frames.size()));
  }
  validate(frames);

  BreathReport report;
  report.config = config;
  report.total_frames = frames.size();
  report.sample_rate = frames.nominal_rate;

  CentroidTrack track = extract_centroids(frames, config.roi);
  report.empty_frames = std::move(track.empty_frames);

  report.trace.raw = project_series(track.centroids, config.projection, frames.nominal_rate);
  report.trace.smoothed = moving_average(report.trace.raw, config.ma_window);
  const PeakSet minima = detect_local_minima(report.trace.smoothed);
  report.candidate_minima = minima.size();
  report.breaths = filter_peaks_below_mean(minima, report.trace.smoothed);
  report.smoothed_mean = signal_mean(report.trace.smoothed);

  double tau = frames.frames.back().timestamp - frames.frames.front().timestamp;
  if (!(tau > 0.0)) {
    tau = static_cast<double>(frames.size()) / frames.nominal_rate;
  }
  report.measurement_time = tau;
  report.respiratory_rate = respiratory_rate(report.breaths, tau);

  report.trace.variance = moving_variance(report.trace.smoothed, config.var_window);
  report.holds = detect_holds(report.trace.variance, config.hold_threshold, config.min_hold_duration,
                              frames.nominal_rate, report.breaths);

  report.relative_depths.reserve(report.breaths.size());
  for (double amplitude : report.breaths.amplitudes) {
    report.relative_depths.push_back(report.smoothed_mean - amplitude);
  }
  report.depths = cycle_depths(report.trace.raw, report.breaths, config.ma_window);
  return report;
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_BREATH_SIGNAL_HPP
