// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

// Reference computations used only by the tests. Each one takes a different
// route from the library implementation it checks.

#ifndef LIDAR_BREATH_TESTS_ORACLES_HPP
#define LIDAR_BREATH_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lidar_breath/vlp16.hpp"

namespace oracle {

/// Causal mean over samples n, n-1, ..., max(0, n-M+1), accumulated newest
/// first in extended precision.
inline std::vector<double> moving_average(const std::vector<double>& y, std::size_t window) {
  std::vector<double> out(y.size());
  for (std::size_t n = 0; n < y.size(); ++n) {
    long double sum = 0.0L;
    std::size_t count = 0;
    for (std::size_t m = 0; m < window && m <= n; ++m) {
      sum += static_cast<long double>(y[n - m]);
      ++count;
    }
    out[n] = static_cast<double>(sum / static_cast<long double>(count));
  }
  return out;
}

/// Sample variance through the pairwise identity
/// s^2 = sum_{i<j} (y_i - y_j)^2 / (k (k - 1)), which needs no mean.
inline std::vector<double> moving_variance(const std::vector<double>& y, std::size_t window) {
  const auto count = static_cast<std::ptrdiff_t>(y.size());
  const auto back = static_cast<std::ptrdiff_t>((window - 1) / 2);
  const auto ahead = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> out(y.size());
  for (std::ptrdiff_t n = 0; n < count; ++n) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, n - back);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(count - 1, n + ahead);
    const std::ptrdiff_t k = hi - lo + 1;
    if (k < 2) {
      out[static_cast<std::size_t>(n)] = 0.0;
      continue;
    }
    long double sum = 0.0L;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      for (std::ptrdiff_t j = i + 1; j <= hi; ++j) {
        const long double d = static_cast<long double>(y[static_cast<std::size_t>(i)]) -
                              static_cast<long double>(y[static_cast<std::size_t>(j)]);
        sum += d * d;
      }
    }
    out[static_cast<std::size_t>(n)] = static_cast<double>(sum / static_cast<long double>(k * (k - 1)));
  }
  return out;
}

/// True when `r` is the correctly rounded value of x / tau. The residual
/// r*tau - x of a correctly rounded quotient is exact under one FMA, and the
/// half-ulp bounds times tau are exact because the ulps are powers of two.
inline bool is_correctly_rounded_quotient(double r, double x, double tau) {
  const double residual = std::fma(r, tau, -x);
  const double ulp_up = std::nextafter(r, INFINITY) - r;
  const double ulp_down = r - std::nextafter(r, -INFINITY);
  if (residual > 0.0) {
    return residual <= std::ldexp(ulp_down, -1) * tau;
  }
  return -residual <= std::ldexp(ulp_up, -1) * tau;
}

/// Local minima by the plain definition: strictly below the left neighbour,
/// then equal values, then strictly rising. Reported at the run's first index.
inline std::vector<std::size_t> local_minima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n + 1 < y.size(); ++n) {
    if (!(y[n - 1] > y[n])) continue;
    std::size_t j = n;
    while (j + 1 < y.size() && y[j + 1] == y[n]) ++j;
    if (j + 1 < y.size() && y[j + 1] > y[n]) out.push_back(n);
  }
  return out;
}

/// Whole rotations of packets with evenly spaced block azimuths starting at
/// 0. Every record gets a pseudo-random distance; about one in eight is a
/// no-return (distance 0).
struct RotationStream {
  std::vector<lidar_breath::vlp16::Packet> packets;
  std::vector<lidar_breath::vlp16::BlockRecord> blocks;  // in stream order
  std::vector<std::uint32_t> timestamps;                 // per packet
};

inline RotationStream make_rotations(std::size_t rotations, std::uint16_t step, std::uint64_t seed,
                                     std::uint32_t start_us = 0, std::uint32_t packet_us = 1327) {
  using namespace lidar_breath::vlp16;
  RotationStream stream;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> distance(1, 60000);
  std::uniform_int_distribution<int> reflect(0, 255);
  std::uniform_int_distribution<int> miss(0, 7);
  const std::size_t blocks_per_rotation = kAzimuthModulus / step;
  const std::size_t total_blocks = rotations * blocks_per_rotation;
  const std::size_t packet_count = (total_blocks + kBlocksPerPacket - 1) / kBlocksPerPacket;
  std::uint32_t ts = start_us;
  for (std::size_t p = 0; p < packet_count; ++p) {
    std::array<BlockRecord, kBlocksPerPacket> blocks{};
    for (std::size_t b = 0; b < kBlocksPerPacket; ++b) {
      const std::size_t global = p * kBlocksPerPacket + b;
      // Pad the final packet by continuing the sweep without wrapping.
      const std::size_t position = global < total_blocks ? global % blocks_per_rotation
                                                         : blocks_per_rotation - 1;
      blocks[b].azimuth = static_cast<std::uint16_t>(position * step);
      for (std::size_t r = 0; r < kRecordsPerBlock; ++r) {
        blocks[b].distance[r] = miss(rng) == 0 ? 0 : static_cast<std::uint16_t>(distance(rng));
        blocks[b].reflectivity[r] = static_cast<std::uint8_t>(reflect(rng));
      }
      stream.blocks.push_back(blocks[b]);
    }
    stream.packets.push_back(encode_packet(blocks, ts));
    stream.timestamps.push_back(ts);
    ts = static_cast<std::uint32_t>((static_cast<std::uint64_t>(ts) + packet_us) % 3'600'000'000ULL);  // sensor clock restarts hourly
  }
  return stream;
}

}  // namespace oracle

#endif  // LIDAR_BREATH_TESTS_ORACLES_HPP
