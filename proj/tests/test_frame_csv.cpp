// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "lidar_breath/frame_csv.hpp"

namespace lb = lidar_breath;

namespace {

lb::FrameSequence random_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> frames(1, 30), points(1, 40);
  std::uniform_int_distribution<std::size_t> gap(1, 3);
  std::uniform_real_distribution<double> coord(-50, 50);
  lb::FrameSequence seq;
  std::size_t index = 0;
  double t = 0.0;
  const std::size_t n = frames(rng);
  for (std::size_t i = 0; i < n; ++i) {
    lb::PointFrame f{index, t, {}};
    for (std::size_t k = points(rng); k > 0; --k) f.points.push_back({coord(rng), coord(rng), coord(rng)});
    seq.frames.push_back(f);
    index += gap(rng);
    t += 0.1;
  }
  return seq;
}

lb::Error read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    lb::read_frames_csv(in, "input.csv");
  } catch (const lb::Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error";
  return lb::Error(lb::ErrorCode::Io, "");
}

}  // namespace

TEST(FrameCsv, RoundTripIsExact) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto seq = random_sequence(rng);
    std::stringstream buf;
    lb::write_frames_csv(seq, buf);
    const auto back = lb::read_frames_csv(buf);
    ASSERT_EQ(back.size(), seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      EXPECT_EQ(back.frames[i].index, seq.frames[i].index);
      EXPECT_EQ(back.frames[i].timestamp, seq.frames[i].timestamp);
      EXPECT_EQ(back.frames[i].points, seq.frames[i].points);
    }
  }
}

TEST(FrameCsv, RowsWithSameFrameGroup) {
  std::istringstream in("frame,t,x,y,z\n0,0.0,1,2,3\n0,0.0,4,5,6\n");
  const auto seq = lb::read_frames_csv(in);
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq.frames[0].points.size(), 2u);
  EXPECT_EQ(seq.frames[0].points[1], (lb::Point3{4, 5, 6}));
}

TEST(FrameCsv, NonNumericFieldNamesLine) {
  const auto e = read_error("frame,t,x,y,z\n0,0,1,2,3\n0,0,abc,2,3\n");
  EXPECT_EQ(e.code(), lb::ErrorCode::MalformedRow);
  EXPECT_NE(std::string(e.what()).find("input.csv:3"), std::string::npos) << e.what();
}

TEST(FrameCsv, HeaderMustMatch) {
  EXPECT_EQ(read_error("frame,t,x,y\n").code(), lb::ErrorCode::MalformedHeader);
  EXPECT_EQ(read_error("").code(), lb::ErrorCode::MalformedHeader);
}

TEST(FrameCsv, DecreasingFrameIsNonMonotonic) {
  EXPECT_EQ(read_error("frame,t,x,y,z\n2,0.2,1,2,3\n1,0.1,1,2,3\n").code(), lb::ErrorCode::NonMonotonicFrames);
  EXPECT_EQ(read_error("frame,t,x,y,z\n1,0.2,1,2,3\n2,0.1,1,2,3\n").code(), lb::ErrorCode::NonMonotonicFrames);
}

TEST(FrameCsv, OtherMalformedRows) {
  EXPECT_EQ(read_error("frame,t,x,y,z\n0,0,1,2\n").code(), lb::ErrorCode::MalformedRow);
  EXPECT_EQ(read_error("frame,t,x,y,z\n-1,0,1,2,3\n").code(), lb::ErrorCode::MalformedRow);
  EXPECT_EQ(read_error("frame,t,x,y,z\n0,0,1,2,nan\n").code(), lb::ErrorCode::MalformedRow);
  EXPECT_EQ(read_error("frame,t,x,y,z\n0,0,1,2,3\n0,0.5,1,2,3\n").code(), lb::ErrorCode::MalformedRow);
}

TEST(FrameCsv, ToleratesCrLfAndBlankLines) {
  std::istringstream in("frame,t,x,y,z\r\n0,0,1,2,3\r\n\r\n1,0.1,1,2,3\r\n");
  const auto seq = lb::read_frames_csv(in);
  EXPECT_EQ(seq.size(), 2u);
  EXPECT_NEAR(seq.nominal_rate, 10.0, 1e-9);
}

TEST(FrameCsv, FileRoundTripAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "lidar_breath_test_csv";
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(8);
  const auto seq = random_sequence(rng);
  lb::write_frames_csv(seq, dir / "frames.csv");
  const auto back = lb::read_frames_csv(dir / "frames.csv");
  EXPECT_EQ(back.size(), seq.size());
  try {
    lb::read_frames_csv(dir / "missing.csv");
    FAIL();
  } catch (const lb::Error& e) {
    EXPECT_EQ(e.code(), lb::ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
