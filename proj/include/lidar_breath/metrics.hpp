// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_METRICS_HPP
#define LIDAR_BREATH_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "lidar_breath/breath_signal.hpp"
#include "lidar_breath/error.hpp"
#include "lidar_breath/synth.hpp"
#include "lidar_breath/text.hpp"

namespace lidar_breath {

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }

  /// (TP + TN) / total; an empty confusion counts as perfect.
  double accuracy() const noexcept {
    return total() == 0 ? 1.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
  }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct EventMatch {
  std::size_t detected = 0;  // index into the detected frames
  std::size_t truth = 0;     // index into the truth frames
};

struct EventScore {
  Confusion confusion;
  double accuracy = 0.0;
  std::vector<EventMatch> matches;  // ordered by detected index
};

/// One-to-one matching within +-tol frames, closest pairs first (ties broken
/// by truth frame, then detected frame). TN counts truth hold episodes that
/// contain no detection.
inline EventScore breath_event_accuracy(std::span<const std::size_t> detected, const GroundTruth& truth,
                                        std::size_t tol) {
  const std::vector<std::size_t>& events = truth.breath_event_frames;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> candidates;  // (distance, truth, detected)
  for (std::size_t d = 0; d < detected.size(); ++d) {
    for (std::size_t t = 0; t < events.size(); ++t) {
      const std::size_t gap = detected[d] > events[t] ? detected[d] - events[t] : events[t] - detected[d];
      if (gap <= tol) {
        candidates.emplace_back(gap, t, d);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    return std::make_tuple(std::get<0>(a), events[std::get<1>(a)], detected[std::get<2>(a)]) <
           std::make_tuple(std::get<0>(b), events[std::get<1>(b)], detected[std::get<2>(b)]);
  });

  EventScore score;
  std::vector<bool> detected_used(detected.size(), false);
  std::vector<bool> truth_used(events.size(), false);
  for (const auto& [gap, t, d] : candidates) {
    if (detected_used[d] || truth_used[t]) continue;
    detected_used[d] = true;
    truth_used[t] = true;
    score.matches.push_back({d, t});
  }
  std::sort(score.matches.begin(), score.matches.end(),
            [](const EventMatch& a, const EventMatch& b) { return a.detected < b.detected; });

  Confusion& c = score.confusion;
  c.tp = score.matches.size();
  c.fp = detected.size() - c.tp;
  c.fn = events.size() - c.tp;
  for (const HoldEpisode& episode : truth.hold_episodes) {
    const bool clean = std::none_of(detected.begin(), detected.end(), [&](std::size_t f) {
      return episode.start <= f && f <= episode.end;
    });
    if (clean) ++c.tn;
  }
  score.accuracy = c.accuracy();
  return score;
}

inline EventScore breath_event_accuracy(const PeakSet& detected, const GroundTruth& truth, std::size_t tol) {
  return breath_event_accuracy(std::span<const std::size_t>(detected.frames), truth, tol);
}

struct FrameScore {
  Confusion confusion;
  double accuracy = 0.0;
};

/// Per-frame hold classification over frames [0, total_frames).
inline FrameScore hold_frame_accuracy(std::span<const std::size_t> flagged, const GroundTruth& truth,
                                      std::size_t total_frames) {
  if (total_frames == 0) {
    throw Error(ErrorCode::InvalidConfig, "total frame count must be at least 1");
  }
  const auto mark = [&](std::span<const std::size_t> frames, const char* what) {
    std::vector<bool> bits(total_frames, false);
    for (const std::size_t f : frames) {
      if (f >= total_frames) {
        throw Error(ErrorCode::OutOfRange, std::string(what) + " frame " + std::to_string(f) + " beyond " +
                                               std::to_string(total_frames) + " frames");
      }
      bits[f] = true;
    }
    return bits;
  };
  const std::vector<bool> predicted = mark(flagged, "flagged");
  const std::vector<bool> actual = mark(truth.hold_frames, "truth hold");
  FrameScore score;
  Confusion& c = score.confusion;
  for (std::size_t n = 0; n < total_frames; ++n) {
    if (predicted[n] && actual[n]) ++c.tp;
    else if (!predicted[n] && !actual[n]) ++c.tn;
    else if (predicted[n]) ++c.fp;
    else ++c.fn;
  }
  score.accuracy = c.accuracy();
  return score;
}

inline FrameScore hold_frame_accuracy(const HoldSet& holds, const GroundTruth& truth, std::size_t total_frames) {
  return hold_frame_accuracy(std::span<const std::size_t>(holds.frames), truth, total_frames);
}

inline double rmse(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(estimates.size()) + " estimates vs " +
                                               std::to_string(truths.size()) + " truths");
  }
  if (estimates.empty()) {
    throw Error(ErrorCode::EmptyInput, "rmse of an empty list");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

struct EvalResult {
  Confusion breath_confusion;
  double breathing_accuracy = 0.0;
  Confusion hold_confusion;
  double hold_accuracy = 0.0;
  std::optional<double> depth_rmse;  // empty when no event matched
  double rate_rmse = 0.0;
  std::size_t matched_events = 0;
  double estimated_rate = 0.0;
  double true_rate = 0.0;
};

/// Depth error uses matched events only, comparing each event's cycle depth
/// with the oracle's true depth.
inline EvalResult evaluate(const BreathReport& report, const GroundTruth& truth, std::size_t tol) {
  if (report.total_frames != truth.total_frames) {
    throw Error(ErrorCode::LengthMismatch, "report covers " + std::to_string(report.total_frames) +
                                               " frames, ground truth " + std::to_string(truth.total_frames));
  }
  EvalResult result;
  const EventScore events = breath_event_accuracy(report.breaths, truth, tol);
  result.breath_confusion = events.confusion;
  result.breathing_accuracy = events.accuracy;
  result.matched_events = events.matches.size();

  const FrameScore holds = hold_frame_accuracy(report.holds, truth, report.total_frames);
  result.hold_confusion = holds.confusion;
  result.hold_accuracy = holds.accuracy;

  if (!events.matches.empty()) {
    if (report.depths.size() != report.breaths.frames.size()) {
      throw Error(ErrorCode::LengthMismatch, "report carries " + std::to_string(report.depths.size()) +
                                                 " depths for " + std::to_string(report.breaths.frames.size()) +
                                                 " events");
    }
    std::vector<double> estimated;
    for (const EventMatch& m : events.matches) estimated.push_back(report.depths[m.detected]);
    const std::vector<double> expected(estimated.size(), truth.true_depth);
    result.depth_rmse = rmse(estimated, expected);
  }
  const double r[1] = {report.respiratory_rate};
  const double rt[1] = {truth.true_rate};
  result.rate_rmse = rmse(r, rt);
  result.estimated_rate = report.respiratory_rate;
  result.true_rate = truth.true_rate;
  return result;
}

/// Flat key=value evaluation summary.
inline void write_eval_text(const EvalResult& e, const std::string& scenario, std::ostream& out) {
  const auto& b = e.breath_confusion;
  const auto& h = e.hold_confusion;
  out << "scenario=" << scenario << '\n'
      << "breathing_accuracy=" << text::format_double(e.breathing_accuracy) << '\n'
      << "hold_accuracy=" << text::format_double(e.hold_accuracy) << '\n'
      << "depth_rmse=" << (e.depth_rmse ? text::format_double(*e.depth_rmse) : std::string("nan")) << '\n'
      << "rate_rmse=" << text::format_double(e.rate_rmse) << '\n'
      << "estimated_rate=" << text::format_double(e.estimated_rate) << '\n'
      << "true_rate=" << text::format_double(e.true_rate) << '\n'
      << "matched_events=" << e.matched_events << '\n'
      << "breath_tp=" << b.tp << "\nbreath_tn=" << b.tn << "\nbreath_fp=" << b.fp << "\nbreath_fn=" << b.fn << '\n'
      << "hold_tp=" << h.tp << "\nhold_tn=" << h.tn << "\nhold_fp=" << h.fp << "\nhold_fn=" << h.fn << '\n';
}

inline constexpr std::string_view kEvalCsvHeader = "scenario,breathing_accuracy,hold_accuracy,depth_rmse,rate_rmse";

inline void write_eval_csv(const EvalResult& e, const std::string& scenario, std::ostream& out) {
  out << kEvalCsvHeader << '\n'
      << scenario << ',' << text::format_double(e.breathing_accuracy) << ','
      << text::format_double(e.hold_accuracy) << ','
      << (e.depth_rmse ? text::format_double(*e.depth_rmse) : std::string("nan")) << ','
      << text::format_double(e.rate_rmse) << '\n';
}

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_METRICS_HPP
