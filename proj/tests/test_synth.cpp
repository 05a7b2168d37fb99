// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "lidar_breath/frame_csv.hpp"
#include "lidar_breath/synth.hpp"

namespace lb = lidar_breath;

namespace {

double along(const lb::Point3& p, const lb::Point3& dir) { return p.x * dir.x + p.y * dir.y + p.z * dir.z; }

// Centroid excursion along the chest normal (toward the sensor) per frame.
std::vector<double> normal_track(const lb::Scene& scene, lb::Scenario s) {
  const auto g = lb::geometry(s);
  const lb::Point3 normal{-g.toward_subject.x, -g.toward_subject.y, -g.toward_subject.z};
  std::vector<double> out;
  for (const auto& f : scene.frames.frames) {
    const auto c = lb::centroid(f);
    out.push_back(along({c.cx, c.cy, c.cz}, normal));
  }
  return out;
}

}  // namespace

TEST(DisplacementProfile, ScheduleShape) {
  const lb::SynthConfig c;
  EXPECT_EQ(lb::displacement_profile(0.0, c), 0.0);
  EXPECT_NEAR(lb::displacement_profile(c.set_start(1), c), 0.0, 1e-18);
  EXPECT_DOUBLE_EQ(lb::displacement_profile(2.5, c), c.amplitude);
  EXPECT_EQ(lb::displacement_profile(30.0, c), 0.0);  // inside the first hold
}

TEST(DisplacementProfile, OutsideScheduleFails) {
  const lb::SynthConfig c;
  EXPECT_THROW(lb::displacement_profile(-0.1, c), lb::Error);
  EXPECT_THROW(lb::displacement_profile(c.schedule_duration() + 0.1, c), lb::Error);
  EXPECT_NO_THROW(lb::displacement_profile(c.schedule_duration(), c));
}

TEST(DisplacementProfile, ContinuousAcrossBoundaries) {
  const lb::SynthConfig c;
  for (double t = 0.0; t < c.schedule_duration() - 0.001; t += 0.001) {
    ASSERT_LE(std::abs(lb::displacement_profile(t + 0.001, c) - lb::displacement_profile(t, c)), 1e-5) << t;
  }
}

TEST(GenerateScene, DefaultScheduleLabels) {
  const auto scene = lb::generate_scene({});
  const auto& truth = scene.truth;
  EXPECT_EQ(scene.frames.size(), 951u);
  EXPECT_EQ(truth.breath_event_frames.size(), 15u);
  ASSERT_EQ(truth.hold_episodes.size(), 2u);
  EXPECT_EQ(truth.hold_episodes[0], (lb::HoldEpisode{251, 350}));
  EXPECT_EQ(truth.hold_episodes[1], (lb::HoldEpisode{601, 700}));
  EXPECT_EQ(truth.hold_frames.size(), 200u);
  EXPECT_EQ(truth.tau, 95.0);
  EXPECT_EQ(truth.true_depth, 0.005);
  EXPECT_EQ(truth.breath_event_frames.front(), 25u);
  EXPECT_EQ(truth.breath_event_frames[5], 375u);
}

TEST(GenerateScene, TruthSetsAreDisjointAndRateConsistent) {
  for (std::size_t sets : {1u, 2u, 4u}) {
    lb::SynthConfig c;
    c.sets = sets;
    c.breaths_per_set = 3;
    c.breath_period = 4.0;
    const auto truth = lb::generate_scene(c).truth;
    for (std::size_t f : truth.breath_event_frames) {
      EXPECT_FALSE(std::binary_search(truth.hold_frames.begin(), truth.hold_frames.end(), f));
    }
    const double count = static_cast<double>(sets * 3);
    EXPECT_EQ(truth.true_rate, 60.0 * count / truth.tau);
    // Same value as count / tau * 60 up to the final rounding of that ordering.
    EXPECT_NEAR(truth.true_rate, count / truth.tau * 60.0, 1e-12 * truth.true_rate);
    EXPECT_EQ(truth.hold_episodes.size(), sets - 1);
  }
}

TEST(GenerateScene, SeededDeterminism) {
  lb::SynthConfig c;
  c.noise_sigma = 0.002;
  c.seed = 99;
  const auto a = lb::generate_scene(c);
  const auto b = lb::generate_scene(c);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) EXPECT_EQ(a.frames.frames[i].points, b.frames.frames[i].points);
  c.seed = 100;
  EXPECT_NE(lb::generate_scene(c).frames.frames[0].points, a.frames.frames[0].points);
}

TEST(GenerateScene, NoiselessCentroidExcursionIsAttenuatedAmplitude) {
  for (auto s : {lb::Scenario::FrontSeated, lb::Scenario::RearSeated, lb::Scenario::RightSide, lb::Scenario::LeftSide,
                 lb::Scenario::SupineOverhead}) {
    lb::SynthConfig c;
    c.scenario = s;
    const auto scene = lb::generate_scene(c);
    const auto track = normal_track(scene, s);
    const auto [lo, hi] = std::minmax_element(track.begin(), track.end());
    EXPECT_NEAR(*hi - *lo, c.amplitude * lb::geometry(s).attenuation, 1e-9) << lb::to_string(s);
    EXPECT_EQ(scene.truth.true_depth, c.amplitude * lb::geometry(s).attenuation);
  }
}

TEST(GenerateScene, RearMovesThreeTenthsOfFront) {
  lb::SynthConfig front;
  lb::SynthConfig rear;
  rear.scenario = lb::Scenario::RearSeated;
  const auto f = normal_track(lb::generate_scene(front), front.scenario);
  const auto r = normal_track(lb::generate_scene(rear), rear.scenario);
  const double fe = *std::max_element(f.begin(), f.end()) - *std::min_element(f.begin(), f.end());
  const double re = *std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end());
  EXPECT_NEAR(re / fe, 0.3, 1e-6);
}

TEST(GenerateScene, PreferredAxisShowsTroughsAtInhalation) {
  for (auto s : {lb::Scenario::FrontSeated, lb::Scenario::RightSide, lb::Scenario::LeftSide,
                 lb::Scenario::SupineOverhead}) {
    lb::SynthConfig c;
    c.scenario = s;
    const auto scene = lb::generate_scene(c);
    std::vector<lb::CentroidSample> cs;
    for (const auto& f : scene.frames.frames) cs.push_back(lb::centroid(f));
    for (auto mode : {lb::preferred_projection(s), lb::ProjectionMode{}}) {
      const auto y = lb::project_series(cs, mode);
      EXPECT_LT(y[25], y[0]) << lb::to_string(s);
      EXPECT_LT(y[25], y[50]) << lb::to_string(s);
    }
  }
}

TEST(GenerateScene, InvalidConfig) {
  lb::SynthConfig c;
  c.sets = 0;
  EXPECT_THROW(lb::generate_scene(c), lb::Error);
  c = {};
  c.amplitude = 0.0;
  EXPECT_THROW(lb::generate_scene(c), lb::Error);
  c = {};
  c.noise_sigma = -1e-3;
  EXPECT_THROW(lb::generate_scene(c), lb::Error);
}

TEST(GenerateScene, FrameCsvRoundTripIsLossless) {
  lb::SynthConfig c;
  c.noise_sigma = 0.001;
  const auto scene = lb::generate_scene(c);
  std::stringstream buf;
  lb::write_frames_csv(scene.frames, buf);
  const auto back = lb::read_frames_csv(buf);
  ASSERT_EQ(back.size(), scene.frames.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back.frames[i].timestamp, scene.frames.frames[i].timestamp);
    EXPECT_EQ(back.frames[i].points, scene.frames.frames[i].points);
  }
}

TEST(Scenario, NamesAndLetters) {
  EXPECT_EQ(lb::parse_scenario("a"), lb::Scenario::FrontSeated);
  EXPECT_EQ(lb::parse_scenario("e"), lb::Scenario::SupineOverhead);
  for (int i = 0; i < 5; ++i) {
    const auto s = static_cast<lb::Scenario>(i);
    EXPECT_EQ(lb::parse_scenario(lb::to_string(s)), s);
  }
  EXPECT_THROW(lb::parse_scenario("f"), lb::Error);
}

TEST(TruthCsv, RoundTrip) {
  const auto truth = lb::generate_scene({}).truth;
  std::stringstream buf;
  lb::write_truth_csv(truth, buf);
  const auto back = lb::read_truth_csv(buf);
  EXPECT_EQ(back.breath_event_frames, truth.breath_event_frames);
  EXPECT_EQ(back.hold_frames, truth.hold_frames);
  EXPECT_EQ(back.hold_episodes, truth.hold_episodes);
  EXPECT_EQ(back.true_rate, truth.true_rate);
  EXPECT_EQ(back.true_depth, truth.true_depth);
  EXPECT_EQ(back.tau, truth.tau);
  EXPECT_EQ(back.total_frames, truth.total_frames);
}

TEST(TruthCsv, Malformed) {
  std::istringstream no_meta("kind,frame\nbreath,3\n");
  EXPECT_THROW(lb::read_truth_csv(no_meta), lb::Error);
  std::istringstream bad_kind("# true_rate=1\n# true_depth=1\n# tau=1\n# frames=5\nkind,frame\nsigh,3\n");
  EXPECT_THROW(lb::read_truth_csv(bad_kind), lb::Error);
}
