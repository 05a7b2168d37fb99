// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_POINTCLOUD_HPP
#define LIDAR_BREATH_POINTCLOUD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lidar_breath/error.hpp"
#include "lidar_breath/series.hpp"

namespace lidar_breath {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline bool is_finite(const Point3& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// One LiDAR sweep. `timestamp` is seconds since capture start.
struct PointFrame {
  std::size_t index = 0;
  double timestamp = 0.0;
  std::vector<Point3> points;
};

struct FrameSequence {
  std::vector<PointFrame> frames;
  double nominal_rate = 10.0;

  std::size_t size() const noexcept { return frames.size(); }
  bool empty() const noexcept { return frames.empty(); }
};

/// Reciprocal of the median spacing between frame timestamps, or `fallback`
/// when there are fewer than two frames or the median spacing is not positive.
inline double infer_nominal_rate(const std::vector<PointFrame>& frames, double fallback = 10.0) {
  std::vector<double> spacing;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    spacing.push_back(frames[i].timestamp - frames[i - 1].timestamp);
  }
  if (spacing.empty()) {
    return fallback;
  }
  std::sort(spacing.begin(), spacing.end());
  const std::size_t mid = spacing.size() / 2;
  const double median = spacing.size() % 2 == 1 ? spacing[mid] : 0.5 * (spacing[mid - 1] + spacing[mid]);
  return median > 0.0 ? 1.0 / median : fallback;
}

/// Checks index/timestamp ordering and point finiteness.
inline void validate(const FrameSequence& seq) {
  if (!(seq.nominal_rate > 0.0) || !std::isfinite(seq.nominal_rate)) {
    throw Error(ErrorCode::InvalidConfig, "nominal frame rate must be positive");
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const PointFrame& f = seq.frames[i];
    if (!std::isfinite(f.timestamp) || f.timestamp < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "frame " + std::to_string(f.index) + " has an invalid timestamp");
    }
    if (i > 0) {
      const PointFrame& prev = seq.frames[i - 1];
      if (f.index <= prev.index) {
        throw Error(ErrorCode::NonMonotonicFrames, "frame indices must be strictly increasing at position " + std::to_string(i));
      }
      if (f.timestamp < prev.timestamp) {
        throw Error(ErrorCode::NonMonotonicFrames, "timestamps decrease at frame " + std::to_string(f.index));
      }
    }
    for (const Point3& p : f.points) {
      if (!is_finite(p)) {
        throw Error(ErrorCode::InvalidConfig, "non-finite point in frame " + std::to_string(f.index));
      }
    }
  }
}

/// Axis-aligned torso box, bounds inclusive on both ends.
struct Roi {
  double x_lo = -std::numeric_limits<double>::infinity();
  double x_hi = std::numeric_limits<double>::infinity();
  double y_lo = -std::numeric_limits<double>::infinity();
  double y_hi = std::numeric_limits<double>::infinity();
  double z_lo = -std::numeric_limits<double>::infinity();
  double z_hi = std::numeric_limits<double>::infinity();

  static Roi unbounded() noexcept { return {}; }

  bool valid() const noexcept {
    return !std::isnan(x_lo) && !std::isnan(x_hi) && !std::isnan(y_lo) && !std::isnan(y_hi) &&
           !std::isnan(z_lo) && !std::isnan(z_hi) && x_lo <= x_hi && y_lo <= y_hi && z_lo <= z_hi;
  }

  bool contains(const Point3& p) const noexcept {
    return x_lo <= p.x && p.x <= x_hi && y_lo <= p.y && p.y <= y_hi && z_lo <= p.z && p.z <= z_hi;
  }
};

struct CentroidSample {
  std::size_t frame = 0;
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
};

enum class ProjectionAxis { X, Y, Z, MeanOfAxes };
enum class Polarity { Normal, Inverted };

struct ProjectionMode {
  ProjectionAxis axis = ProjectionAxis::MeanOfAxes;
  Polarity polarity = Polarity::Normal;

  friend bool operator==(const ProjectionMode&, const ProjectionMode&) = default;
};

inline std::string to_string(ProjectionAxis axis) {
  switch (axis) {
    case ProjectionAxis::X: return "x";
    case ProjectionAxis::Y: return "y";
    case ProjectionAxis::Z: return "z";
    case ProjectionAxis::MeanOfAxes: return "mean";
  }
  return "mean";
}

inline ProjectionAxis parse_projection_axis(const std::string& name) {
  if (name == "x") return ProjectionAxis::X;
  if (name == "y") return ProjectionAxis::Y;
  if (name == "z") return ProjectionAxis::Z;
  if (name == "mean") return ProjectionAxis::MeanOfAxes;
  throw Error(ErrorCode::InvalidConfig, "unknown projection '" + name + "' (expected x, y, z or mean)");
}

/// Keeps exactly the points inside `roi`, preserving order, index and timestamp.
inline PointFrame filter_roi(const PointFrame& frame, const Roi& roi) {
  if (!roi.valid()) {
    throw Error(ErrorCode::InvalidRoi, "ROI lower bound exceeds upper bound");
  }
  PointFrame out;
  out.index = frame.index;
  out.timestamp = frame.timestamp;
  out.points.reserve(frame.points.size());
  for (const Point3& p : frame.points) {
    if (roi.contains(p)) {
      out.points.push_back(p);
    }
  }
  return out;
}

inline CentroidSample centroid(const PointFrame& frame) {
  if (frame.points.empty()) {
    throw Error(ErrorCode::EmptyFrame, "frame " + std::to_string(frame.index) + " has no points inside the ROI");
  }
  double sx = 0.0;
  double sy = 0.0;
  double sz = 0.0;
  for (const Point3& p : frame.points) {
    sx += p.x;
    sy += p.y;
    sz += p.z;
  }
  const double count = static_cast<double>(frame.points.size());
  return {frame.index, sx / count, sy / count, sz / count};
}

/// One scalar per centroid: the selected coordinate or the three-way mean,
/// negated when the polarity is inverted.
inline BreathSignal project_series(std::span<const CentroidSample> centroids, ProjectionMode mode,
                                   double sample_rate = 10.0) {
  if (centroids.empty()) {
    throw Error(ErrorCode::EmptyInput, "no centroids to project");
  }
  BreathSignal signal;
  signal.sample_rate = sample_rate;
  signal.samples.reserve(centroids.size());
  const double sign = mode.polarity == Polarity::Inverted ? -1.0 : 1.0;
  for (const CentroidSample& c : centroids) {
    double value = 0.0;
    switch (mode.axis) {
      case ProjectionAxis::X: value = c.cx; break;
      case ProjectionAxis::Y: value = c.cy; break;
      case ProjectionAxis::Z: value = c.cz; break;
      case ProjectionAxis::MeanOfAxes: value = (c.cx + c.cy + c.cz) / 3.0; break;
    }
    signal.samples.push_back(sign * value);
  }
  return signal;
}

struct CentroidTrack {
  std::vector<CentroidSample> centroids;  // one per input frame
  std::vector<std::size_t> empty_frames;  // positions emptied by the ROI
};

/// Filters every frame and extracts its centroid. Frames the ROI empties
/// repeat the previous centroid (leading ones take the first valid centroid)
/// so the track stays aligned with the frame sequence. Fails when more than
/// `max_empty_fraction` of the frames are empty.
inline CentroidTrack extract_centroids(const FrameSequence& seq, const Roi& roi,
                                       double max_empty_fraction = 0.05) {
  if (seq.frames.empty()) {
    throw Error(ErrorCode::EmptyInput, "frame sequence is empty");
  }
  CentroidTrack track;
  std::vector<bool> present(seq.frames.size(), false);
  track.centroids.resize(seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const PointFrame filtered = filter_roi(seq.frames[i], roi);
    if (filtered.points.empty()) {
      track.empty_frames.push_back(i);
      continue;
    }
    track.centroids[i] = centroid(filtered);
    present[i] = true;
  }
  const double empty_fraction =
      static_cast<double>(track.empty_frames.size()) / static_cast<double>(seq.frames.size());
  if (track.empty_frames.size() == seq.frames.size() || empty_fraction > max_empty_fraction) {
    throw Error(ErrorCode::TooManyEmptyFrames,
                std::to_string(track.empty_frames.size()) + " of " + std::to_string(seq.frames.size()) +
                    " frames have no points inside the ROI; check the ROI bounds");
  }
  std::size_t first_valid = 0;
  while (!present[first_valid]) {
    ++first_valid;
  }
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    if (present[i]) {
      continue;
    }
    CentroidSample fill = i < first_valid ? track.centroids[first_valid] : track.centroids[i - 1];
    fill.frame = seq.frames[i].index;
    track.centroids[i] = fill;
  }
  return track;
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_POINTCLOUD_HPP
