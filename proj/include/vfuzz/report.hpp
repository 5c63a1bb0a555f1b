#pragma once

// Paired A/B comparison of campaign reports.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"

namespace vfuzz {

// Per-trial numbers pulled from a campaign report document.
struct TrialMetrics {
  std::string source;
  std::uint64_t seed = 0;
  std::size_t executions = 0;
  std::optional<std::size_t> first_crash_execution;
  std::size_t unique_crashes = 0;
  std::size_t covered_blocks = 0;

  // Trials that never crash count as needing every execution they ran.
  double executions_to_first_crash() const {
    return static_cast<double>(first_crash_execution ? *first_crash_execution : executions);
  }
};

inline TrialMetrics trial_from_report(const json_util::json& j, std::string source) {
  using namespace json_util;
  TrialMetrics t;
  t.source = std::move(source);
  const std::string& w = t.source;
  t.seed = static_cast<std::uint64_t>(get_int(field(field(j, "config", w), "seed", w + " /config"), w + " /config/seed"));
  t.executions = static_cast<std::size_t>(get_int(field(j, "executions", w), w + " /executions"));
  const auto& fc = field(j, "first_crash_execution", w);
  if (!fc.is_null()) t.first_crash_execution = static_cast<std::size_t>(get_int(fc, w + " /first_crash_execution"));
  t.unique_crashes = static_cast<std::size_t>(get_int(field(j, "unique_crashes", w), w + " /unique_crashes"));
  t.covered_blocks = static_cast<std::size_t>(get_int(field(j, "covered_block_count", w), w + " /covered_block_count"));
  return t;
}

// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw InvalidArgument("quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

struct ModeSummary {
  std::size_t trials = 0;
  std::size_t trials_with_crash = 0;
  double first_crash_median = 0;
  double first_crash_q1 = 0;
  double first_crash_q3 = 0;
  double unique_crashes_median = 0;
  double covered_blocks_median = 0;

  double first_crash_iqr() const { return first_crash_q3 - first_crash_q1; }
};

struct CompareSummary {
  ModeSummary a;
  ModeSummary b;
  // "a", "b" or "tie"
  std::string winner_first_crash;
  std::string winner_unique_crashes;
  std::string winner_covered_blocks;
  double delta_first_crash = 0;  // a - b
  double delta_unique_crashes = 0;
  double delta_covered_blocks = 0;
};

inline ModeSummary summarize(const std::vector<TrialMetrics>& trials) {
  ModeSummary s;
  s.trials = trials.size();
  std::vector<double> fc, uc, cb;
  for (const auto& t : trials) {
    fc.push_back(t.executions_to_first_crash());
    uc.push_back(static_cast<double>(t.unique_crashes));
    cb.push_back(static_cast<double>(t.covered_blocks));
    if (t.first_crash_execution) ++s.trials_with_crash;
  }
  s.first_crash_median = quantile(fc, 0.5);
  s.first_crash_q1 = quantile(fc, 0.25);
  s.first_crash_q3 = quantile(fc, 0.75);
  s.unique_crashes_median = quantile(uc, 0.5);
  s.covered_blocks_median = quantile(cb, 0.5);
  return s;
}

// Trials pair up by position and must share their campaign seed.
inline CompareSummary compare(const std::vector<TrialMetrics>& a, const std::vector<TrialMetrics>& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("each mode needs at least one trial");
  if (a.size() != b.size())
    throw InvalidArgument("trial mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " trials");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].seed != b[i].seed)
      throw InvalidArgument("trial mismatch: " + a[i].source + " and " + b[i].source + " use different seeds");
  CompareSummary s;
  s.a = summarize(a);
  s.b = summarize(b);
  auto pick = [](double x, double y, bool lower_wins) {
    if (x == y) return std::string("tie");
    return (x < y) == lower_wins ? std::string("a") : std::string("b");
  };
  s.winner_first_crash = pick(s.a.first_crash_median, s.b.first_crash_median, true);
  s.winner_unique_crashes = pick(s.a.unique_crashes_median, s.b.unique_crashes_median, false);
  s.winner_covered_blocks = pick(s.a.covered_blocks_median, s.b.covered_blocks_median, false);
  s.delta_first_crash = s.a.first_crash_median - s.b.first_crash_median;
  s.delta_unique_crashes = s.a.unique_crashes_median - s.b.unique_crashes_median;
  s.delta_covered_blocks = s.a.covered_blocks_median - s.b.covered_blocks_median;
  return s;
}

inline json_util::json to_json(const ModeSummary& m) {
  return {{"trials", m.trials},
          {"trials_with_crash", m.trials_with_crash},
          {"executions_to_first_crash", {{"median", m.first_crash_median},
                                         {"q1", m.first_crash_q1},
                                         {"q3", m.first_crash_q3},
                                         {"iqr", m.first_crash_iqr()}}},
          {"unique_crashes_median", m.unique_crashes_median},
          {"covered_blocks_median", m.covered_blocks_median}};
}

inline json_util::json to_json(const CompareSummary& s) {
  return {{"a", to_json(s.a)},
          {"b", to_json(s.b)},
          {"winner", {{"executions_to_first_crash", s.winner_first_crash},
                      {"unique_crashes", s.winner_unique_crashes},
                      {"covered_blocks", s.winner_covered_blocks}}},
          {"delta", {{"executions_to_first_crash", s.delta_first_crash},
                     {"unique_crashes", s.delta_unique_crashes},
                     {"covered_blocks", s.delta_covered_blocks}}}};
}

}  // namespace vfuzz
