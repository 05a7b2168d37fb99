// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header for the library. The CLI lives in lidar_breath/cli.hpp and
// is not included here so library users do not pull in CLI11.

#ifndef LIDAR_BREATH_LIDAR_BREATH_HPP
#define LIDAR_BREATH_LIDAR_BREATH_HPP

#include "lidar_breath/breath_signal.hpp"
#include "lidar_breath/error.hpp"
#include "lidar_breath/frame_csv.hpp"
#include "lidar_breath/metrics.hpp"
#include "lidar_breath/pointcloud.hpp"
#include "lidar_breath/report_io.hpp"
#include "lidar_breath/series.hpp"
#include "lidar_breath/synth.hpp"
#include "lidar_breath/text.hpp"
#include "lidar_breath/vlp16.hpp"

#endif  // LIDAR_BREATH_LIDAR_BREATH_HPP
