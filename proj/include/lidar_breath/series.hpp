// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_SERIES_HPP
#define LIDAR_BREATH_SERIES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "lidar_breath/error.hpp"

namespace lidar_breath {

/// Scalar per-frame series (meters) with its sample rate in Hz.
struct BreathSignal {
  std::vector<double> samples;
  double sample_rate = 10.0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double operator[](std::size_t i) const { return samples[i]; }
};

inline void validate(const BreathSignal& signal) {
  if (signal.samples.empty()) {
    throw Error(ErrorCode::EmptyInput, "breath signal has no samples");
  }
  if (!(signal.sample_rate > 0.0) || !std::isfinite(signal.sample_rate)) {
    throw Error(ErrorCode::InvalidConfig, "sample rate must be positive");
  }
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    if (!std::isfinite(signal.samples[i])) {
      throw Error(ErrorCode::InvalidConfig, "non-finite sample at position " + std::to_string(i));
    }
  }
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_SERIES_HPP
