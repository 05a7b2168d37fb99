// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_FRAME_CSV_HPP
#define LIDAR_BREATH_FRAME_CSV_HPP

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "lidar_breath/error.hpp"
#include "lidar_breath/pointcloud.hpp"
#include "lidar_breath/text.hpp"

namespace lidar_breath {

inline constexpr std::string_view kFrameCsvHeader = "frame,t,x,y,z";

/// Rows of one frame share its index and timestamp. Frames without points
/// cannot be represented and are skipped.
inline void write_frames_csv(const FrameSequence& seq, std::ostream& out) {
  out << kFrameCsvHeader << '\n';
  for (const PointFrame& frame : seq.frames) {
    const std::string prefix = std::to_string(frame.index) + ',' + text::format_double(frame.timestamp) + ',';
    for (const Point3& p : frame.points) {
      out << prefix << text::format_double(p.x) << ',' << text::format_double(p.y) << ','
          << text::format_double(p.z) << '\n';
    }
  }
}

/// `source` names the input in error messages.
inline FrameSequence read_frames_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MalformedHeader, source + ": missing header");
  }
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (text::trim(line) != kFrameCsvHeader) {
    throw Error(ErrorCode::MalformedHeader,
                source + ":1: expected header '" + std::string(kFrameCsvHeader) + "', got '" + line + "'");
  }

  FrameSequence seq;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) {
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto fields = text::split(line, ',');
    if (fields.size() != 5) {
      throw Error(ErrorCode::MalformedRow, where + "expected 5 fields, got " + std::to_string(fields.size()));
    }
    const auto frame = text::parse_uint(fields[0]);
    if (!frame) {
      throw Error(ErrorCode::MalformedRow, where + "frame must be a non-negative integer");
    }
    double values[4];
    static constexpr const char* kNames[4] = {"t", "x", "y", "z"};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = text::parse_double(fields[k + 1]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::MalformedRow, where + "field " + kNames[k] + " is not a finite number");
      }
      values[k] = *v;
    }
    if (values[0] < 0.0) {
      throw Error(ErrorCode::MalformedRow, where + "t must be non-negative");
    }
    if (!seq.frames.empty() && *frame < seq.frames.back().index) {
      throw Error(ErrorCode::NonMonotonicFrames, where + "frame " + std::to_string(*frame) + " follows frame " +
                                                     std::to_string(seq.frames.back().index));
    }
    if (seq.frames.empty() || *frame != seq.frames.back().index) {
      if (!seq.frames.empty() && values[0] < seq.frames.back().timestamp) {
        throw Error(ErrorCode::NonMonotonicFrames, where + "timestamp decreases");
      }
      PointFrame next;
      next.index = static_cast<std::size_t>(*frame);
      next.timestamp = values[0];
      seq.frames.push_back(std::move(next));
    } else if (values[0] != seq.frames.back().timestamp) {
      throw Error(ErrorCode::MalformedRow, where + "t differs from earlier rows of frame " + std::to_string(*frame));
    }
    seq.frames.back().points.push_back({values[1], values[2], values[3]});
  }
  seq.nominal_rate = infer_nominal_rate(seq.frames);
  return seq;
}

inline void write_frames_csv(const FrameSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  write_frames_csv(seq, out);
  if (!out) {
    throw Error(ErrorCode::Io, "write failed for " + path.string());
  }
}

inline FrameSequence read_frames_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  return read_frames_csv(in, path.string());
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_FRAME_CSV_HPP
