#pragma once

// Vulnerability-oriented evolutionary fuzzing loop.
//
// Each generation executes every testcase, scores it (SVS sum along its
// path, or the number of globally new blocks it touched), records crashes
// and coverage, adapts the mutation strategy with the crash-window
// scheduler, keeps crashing inputs plus the top-K by fitness, and mutates
// pool seeds into the next generation.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"
#include "vfuzz/rng.hpp"
#include "vfuzz/scoring.hpp"
#include "vfuzz/vm.hpp"

namespace vfuzz {

enum class Strategy : std::uint8_t { Slight, Heavy };
enum class FitnessMode : std::uint8_t { SvsSum, CoverageCount };
enum class SeedOrigin : std::uint8_t { Initial, Mutated, Crash };

inline std::string_view to_string(Strategy s) { return s == Strategy::Slight ? "slight" : "heavy"; }
inline std::string_view to_string(FitnessMode m) { return m == FitnessMode::SvsSum ? "svs_sum" : "coverage_count"; }
inline std::string_view to_string(SeedOrigin o) {
  switch (o) {
    case SeedOrigin::Initial: return "initial";
    case SeedOrigin::Mutated: return "mutated";
    case SeedOrigin::Crash: return "crash";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Mutation

inline constexpr std::array<std::uint8_t, 5> kInterestingBytes{0x00, 0xFF, 0x7F, 0x80, '*'};

// 1-4 small edits touching at most four byte positions in total, with at
// most one single-byte insertion.
inline Bytes mutate_slight(std::span<const std::uint8_t> seed, Rng& rng) {
  Bytes out(seed.begin(), seed.end());
  const int ops = uniform_int(rng, 1, 4);
  int budget = 4;
  bool inserted = false;
  auto interesting = [&] { return kInterestingBytes[uniform_int<std::size_t>(rng, 0, kInterestingBytes.size() - 1)]; };
  for (int k = 0; k < ops && budget > 0; ++k) {
    int op = uniform_int(rng, 0, 3);
    if (out.empty()) op = 2;
    if ((op == 2 && inserted) || (op == 3 && budget < 2)) op = 0;
    switch (op) {
      case 0: {  // bit flip
        const auto pos = uniform_int<std::size_t>(rng, 0, out.size() - 1);
        out[pos] ^= static_cast<std::uint8_t>(1u << uniform_int(rng, 0, 7));
        budget -= 1;
        break;
      }
      case 1: {  // byte replace
        const auto pos = uniform_int<std::size_t>(rng, 0, out.size() - 1);
        out[pos] = bernoulli(rng, 0.5) ? interesting() : static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
        budget -= 1;
        break;
      }
      case 2: {  // insert one interesting byte
        const auto pos = uniform_int<std::size_t>(rng, 0, out.size());
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), interesting());
        inserted = true;
        budget -= 1;
        break;
      }
      default: {  // overwrite up to two consecutive bytes
        const std::size_t n = std::min<std::size_t>(out.size(), uniform_int<std::size_t>(rng, 1, 2));
        const auto pos = uniform_int<std::size_t>(rng, 0, out.size() - n);
        for (std::size_t i = 0; i < n; ++i) out[pos + i] = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
        budget -= 2;
        break;
      }
    }
  }
  return out;
}

// head of `a` up to `cut`, tail of `b` from `cut`.
inline Bytes splice(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, std::size_t cut) {
  if (cut > a.size() || cut > b.size()) throw InvalidArgument("splice cut beyond input");
  Bytes out(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
  out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
  return out;
}

// One structure-changing edit: splice with another pool seed, overwrite a
// region with random bytes, or insert/delete a region. Regions span between
// 1/8 and 1/4 of the seed length (at least one byte). The result length
// stays within [1, 4 * |seed|].
inline Bytes mutate_heavy(std::span<const std::uint8_t> seed, std::span<const Bytes> pool, Rng& rng) {
  if (seed.empty()) return Bytes{static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
  const std::size_t len = seed.size();
  std::vector<const Bytes*> partners;
  if (len >= 2) {
    for (const auto& p : pool)
      if (p.size() >= 2 && !std::equal(p.begin(), p.end(), seed.begin(), seed.end())) partners.push_back(&p);
  }
  const int choices = partners.empty() ? 2 : 3;
  const int op = uniform_int(rng, 0, choices - 1);
  const std::size_t lo = std::max<std::size_t>(1, (len + 7) / 8);
  const std::size_t hi = std::max<std::size_t>(lo, len / 4);
  const std::size_t region = uniform_int<std::size_t>(rng, lo, hi);

  if (op == 2) {
    const Bytes& other = *partners[uniform_int<std::size_t>(rng, 0, partners.size() - 1)];
    const std::size_t common = std::min(len, other.size());
    std::size_t first = 0;
    while (first < common && seed[first] == other[first]) ++first;
    std::size_t last = common;
    while (last > first && seed[last - 1] == other[last - 1]) --last;
    const std::size_t cut_lo = std::max<std::size_t>(1, std::min(first, common - 1));
    const std::size_t cut_hi = std::max(cut_lo, std::min(common - 1, last == 0 ? 0 : last - 1));
    Bytes out = splice(seed, other, uniform_int<std::size_t>(rng, cut_lo, cut_hi));
    if (out.size() > 4 * len) out.resize(4 * len);
    if (out.empty()) out.push_back(seed[0]);
    return out;
  }
  Bytes out(seed.begin(), seed.end());
  if (op == 0) {
    const auto pos = uniform_int<std::size_t>(rng, 0, len - region);
    for (std::size_t i = 0; i < region; ++i) out[pos + i] = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
    return out;
  }
  const bool can_delete = len > region;
  if (can_delete && bernoulli(rng, 0.5)) {
    const auto pos = uniform_int<std::size_t>(rng, 0, len - region);
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos), out.begin() + static_cast<std::ptrdiff_t>(pos + region));
  } else {
    const auto pos = uniform_int<std::size_t>(rng, 0, len);
    Bytes fresh(region);
    for (auto& b : fresh) b = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), fresh.begin(), fresh.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crash-window scheduler

struct CwjState {
  long cw = 8;
  long zeta = 0;  // consecutive generations without a new block or crash
  Strategy ms = Strategy::Slight;
  long ini_cw = 8;
  long min_cw = 2;
  long max_cw = 64;

  static CwjState initial(long ini, long min, long max) {
    if (min < 1 || min > ini || ini > max) throw InvalidArgument("crash window bounds must satisfy 1 <= min <= ini <= max");
    return CwjState{ini, 0, Strategy::Slight, ini, min, max};
  }

  bool operator==(const CwjState&) const = default;
};

// One generation of the crash-window schedule. Default: a stuck generation
// beyond the window switches to heavy mutation and halves the window; a
// productive one resets to slight mutation and doubles it. `text_mode`
// swaps the halving and doubling.
inline CwjState cwj_step(CwjState s, bool found_crash, bool found_new_block, bool text_mode = false) {
  auto grow = [&] {
    if (s.cw * 2 <= s.max_cw) s.cw *= 2;
  };
  auto shrink = [&] {
    if (s.cw >= s.min_cw * 2) s.cw /= 2;
  };
  if (!found_crash && !found_new_block) {
    ++s.zeta;
    if (s.zeta > s.cw) {
      s.ms = Strategy::Heavy;
      text_mode ? grow() : shrink();
    }
  } else {
    s.zeta = 0;
    s.ms = Strategy::Slight;
    text_mode ? shrink() : grow();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Seeds

struct Seed {
  Bytes bytes;
  double fitness = 0;
  bool is_crash = false;
  SeedOrigin origin = SeedOrigin::Initial;
  std::size_t discovered_at = 0;  // generation index
  bool operator==(const Seed&) const = default;
};

struct ExecutedInput {
  Bytes bytes;
  double fitness = 0;
  bool crashed = false;
  SeedOrigin origin = SeedOrigin::Mutated;
};

// Every crashing input, then the top-K non-crashing inputs by fitness with
// ties broken by execution order.
inline std::vector<Seed> select_seeds(std::span<const ExecutedInput> generation, std::size_t k,
                                      std::size_t generation_index = 0) {
  if (k < 1) throw InvalidArgument("K must be >= 1");
  if (generation.empty()) throw InvalidArgument("empty generation");
  std::vector<Seed> out;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < generation.size(); ++i) {
    const auto& e = generation[i];
    if (e.crashed) out.push_back({e.bytes, e.fitness, true, SeedOrigin::Crash, generation_index});
    else rest.push_back(i);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) { return generation[a].fitness > generation[b].fitness; });
  for (std::size_t i = 0; i < rest.size() && i < k; ++i) {
    const auto& e = generation[rest[i]];
    out.push_back({e.bytes, e.fitness, false, e.origin, generation_index});
  }
  return out;
}

// Bounded seed pool. Eviction takes the oldest non-crash seed first, then
// the oldest crash seed that is not pinned. Pinned seeds (the first input
// seen for each unique crash) are never evicted, so the pool may exceed its
// capacity only when unique crashes alone outnumber it.
class SeedPool {
 public:
  explicit SeedPool(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidArgument("pool capacity must be positive");
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return seeds_.size(); }
  bool empty() const noexcept { return seeds_.empty(); }
  const std::vector<Seed>& seeds() const noexcept { return seeds_; }
  const Seed& operator[](std::size_t i) const { return seeds_[i]; }
  bool pinned(std::size_t i) const { return pinned_[i]; }

  bool contains(std::span<const std::uint8_t> bytes) const { return find(bytes) != npos; }

  // Re-adding known bytes refreshes the existing entry instead of duplicating it.
  void add(Seed s, bool pin = false) {
    if (auto i = find(s.bytes); i != npos) {
      Seed& e = seeds_[i];
      e.fitness = std::max(e.fitness, s.fitness);
      e.is_crash = e.is_crash || s.is_crash;
      e.discovered_at = std::max(e.discovered_at, s.discovered_at);
      pinned_[i] = pinned_[i] || pin;
    } else {
      seeds_.push_back(std::move(s));
      pinned_.push_back(pin);
    }
    while (seeds_.size() > capacity_ && evict_one()) {
    }
  }

  std::vector<Bytes> contents() const {
    std::vector<Bytes> out;
    out.reserve(seeds_.size());
    for (const auto& s : seeds_) out.push_back(s.bytes);
    return out;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t find(std::span<const std::uint8_t> bytes) const {
    for (std::size_t i = 0; i < seeds_.size(); ++i)
      if (std::equal(seeds_[i].bytes.begin(), seeds_[i].bytes.end(), bytes.begin(), bytes.end())) return i;
    return npos;
  }

  bool evict_one() {
    auto pick = [&](bool crash_tier) {
      std::size_t best = npos;
      for (std::size_t i = 0; i < seeds_.size(); ++i) {
        if (pinned_[i] || seeds_[i].is_crash != crash_tier) continue;
        if (best == npos || seeds_[i].discovered_at < seeds_[best].discovered_at ||
            (seeds_[i].discovered_at == seeds_[best].discovered_at && seeds_[i].fitness < seeds_[best].fitness))
          best = i;
      }
      return best;
    };
    std::size_t victim = pick(false);
    if (victim == npos) victim = pick(true);
    if (victim == npos) return false;
    seeds_.erase(seeds_.begin() + static_cast<std::ptrdiff_t>(victim));
    pinned_.erase(pinned_.begin() + static_cast<std::ptrdiff_t>(victim));
    return true;
  }

  std::size_t capacity_;
  std::vector<Seed> seeds_;
  std::vector<bool> pinned_;
};

// ---------------------------------------------------------------------------
// Campaign

struct CampaignConfig {
  std::size_t population = 50;
  std::size_t top_k = 10;
  std::size_t pool_capacity = 20;
  long ini_cw = 8;
  long min_cw = 2;
  long max_cw = 64;
  bool cwj_text_mode = false;
  FitnessMode mode = FitnessMode::SvsSum;
  bool fitness_dedup_blocks = false;
  std::size_t step_limit = 100000;  // applied by the CLI when it builds the VM target
  std::size_t max_executions = 100000;
  std::optional<double> max_seconds;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void check() const {
    if (top_k < 1 || population < top_k) throw InvalidArgument("need population >= K >= 1");
    if (max_executions == 0) throw InvalidArgument("execution budget must be positive");
    if (max_seconds && !(*max_seconds > 0)) throw InvalidArgument("time budget must be positive");
    if (pool_capacity == 0) throw InvalidArgument("pool capacity must be positive");
    if (step_limit == 0) throw InvalidArgument("step_limit must be positive");
    CwjState::initial(ini_cw, min_cw, max_cw);
  }
};

struct GenerationStats {
  std::size_t generation = 0;
  std::size_t executions = 0;  // cumulative
  std::size_t new_blocks = 0;
  std::size_t covered_blocks = 0;  // cumulative
  std::size_t unique_crashes = 0;  // cumulative
  long cw = 0;
  Strategy ms = Strategy::Slight;
  double best_fitness = 0;
  bool operator==(const GenerationStats&) const = default;
};

struct CrashRecord {
  std::string key;
  CrashKind kind = CrashKind::Assert;
  BlockRef site;
  std::optional<int> bug_id;
  Bytes input;            // first input that produced this key
  std::size_t execution = 0;  // 1-based index of that execution
  std::size_t generation = 0;
  bool operator==(const CrashRecord&) const = default;
};

struct CampaignReport {
  std::vector<GenerationStats> generations;
  std::map<std::string, CrashRecord> catalog;
  std::vector<BlockRef> covered;  // sorted
  std::size_t executions = 0;
  std::optional<std::size_t> first_crash_execution;
  std::vector<Seed> final_pool;
  bool aborted = false;
  std::string abort_reason;
  bool operator==(const CampaignReport&) const = default;
};

// (kind, site function, site block, bug id)
inline std::string crash_key(CrashKind kind, const BlockRef& site, std::optional<int> bug_id) {
  return std::string(to_string(kind)) + "@" + site.function + ":" + std::to_string(site.block) + "#" +
         (bug_id ? std::to_string(*bug_id) : std::string("-"));
}

namespace detail {

inline std::uint64_t pack(const BlockLoc& b) {
  return (static_cast<std::uint64_t>(b.function) << 40) ^ static_cast<std::uint64_t>(b.block);
}

}  // namespace detail

// `svs` may be null in coverage_count mode.
inline CampaignReport run_campaign(const TargetAdapter& target, const SvsMap* svs, const std::vector<Bytes>& initial,
                                   const CampaignConfig& cfg) {
  cfg.check();
  if (initial.empty()) throw InvalidArgument("at least one initial input is required");

  const auto universe = target.block_universe();
  std::unordered_map<std::uint64_t, std::size_t> dense;
  std::vector<double> score(universe.size(), 0.0);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    dense.emplace(detail::pack(universe[i]), i);
    if (cfg.mode == FitnessMode::SvsSum) {
      if (!svs) throw InvalidArgument("svs_sum mode requires an SVS map");
      const BlockRef ref = target.to_ref(universe[i]);
      if (!svs->contains(ref))
        throw InvalidArgument("SVS map lacks block " + std::to_string(ref.block) + " of '" + ref.function + "'");
      score[i] = svs->score(ref);
    }
  }

  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (!cfg.max_seconds) return false;
    const std::chrono::duration<double> el = std::chrono::steady_clock::now() - started;
    return el.count() >= *cfg.max_seconds;
  };

  Rng rng = make_rng(cfg.seed, 0);
  CampaignReport report;
  SeedPool pool(cfg.pool_capacity);
  CwjState cwj = CwjState::initial(cfg.ini_cw, cfg.min_cw, cfg.max_cw);
  std::vector<char> covered(universe.size(), 0);
  std::size_t covered_count = 0;
  std::vector<char> seen_in_input(universe.size(), 0);

  std::vector<Bytes> testcases = initial;
  std::vector<SeedOrigin> origins(initial.size(), SeedOrigin::Initial);

  auto finish = [&] {
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (covered[i]) report.covered.push_back(target.to_ref(universe[i]));
    std::sort(report.covered.begin(), report.covered.end());
    report.final_pool = pool.seeds();
    return report;
  };

  for (std::size_t gen = 0;; ++gen) {
    std::vector<ExecutionResult> results(testcases.size());
    try {
      if (cfg.jobs > 1 && testcases.size() > 1) {
        const std::size_t chunks = std::min(cfg.jobs, testcases.size());
        std::vector<std::future<void>> futs;
        for (std::size_t c = 0; c < chunks; ++c) {
          futs.push_back(std::async(std::launch::async, [&, c] {
            for (std::size_t i = c; i < testcases.size(); i += chunks) results[i] = target.execute(testcases[i]);
          }));
        }
        for (auto& f : futs) f.get();
      } else {
        for (std::size_t i = 0; i < testcases.size(); ++i) results[i] = target.execute(testcases[i]);
      }
    } catch (const std::exception& e) {
      report.aborted = true;
      report.abort_reason = e.what();
      return finish();
    }

    std::vector<ExecutedInput> executed;
    executed.reserve(testcases.size());
    std::vector<bool> representative(testcases.size(), false);
    std::size_t new_blocks = 0;
    bool new_crash = false;
    double best = 0;
    for (std::size_t i = 0; i < testcases.size(); ++i) {
      const ExecutionResult& r = results[i];
      ++report.executions;
      double fit = 0;
      std::size_t fresh = 0;
      std::vector<std::size_t> touched;
      for (const auto& loc : r.path) {
        auto it = dense.find(detail::pack(loc));
        if (it == dense.end()) {
          report.aborted = true;
          report.abort_reason = "target reported a block outside its universe";
          return finish();
        }
        const std::size_t d = it->second;
        if (cfg.fitness_dedup_blocks) {
          if (!seen_in_input[d]) {
            seen_in_input[d] = 1;
            touched.push_back(d);
            fit += score[d];
          }
        } else {
          fit += score[d];
        }
        if (!covered[d]) {
          covered[d] = 1;
          ++covered_count;
          ++fresh;
        }
      }
      for (std::size_t d : touched) seen_in_input[d] = 0;
      new_blocks += fresh;
      if (cfg.mode == FitnessMode::CoverageCount) fit = static_cast<double>(fresh);

      const bool crashed = r.outcome == Outcome::Crash;
      if (crashed) {
        const BlockRef site = target.to_ref(r.crash->site);
        std::string key = crash_key(r.crash->kind, site, r.crash->bug_id);
        if (!report.catalog.count(key)) {
          report.catalog.emplace(key, CrashRecord{key, r.crash->kind, site, r.crash->bug_id, testcases[i],
                                                  report.executions, gen});
          representative[i] = true;
          new_crash = true;
          if (!report.first_crash_execution) report.first_crash_execution = report.executions;
        }
      }
      best = std::max(best, fit);
      executed.push_back({testcases[i], fit, crashed, origins[i]});
    }

    cwj = cwj_step(cwj, new_crash, new_blocks > 0, cfg.cwj_text_mode);

    for (const auto& s : select_seeds(executed, cfg.top_k, gen)) {
      bool pin = false;
      if (s.is_crash) {
        for (std::size_t i = 0; i < executed.size(); ++i)
          if (representative[i] && executed[i].bytes == s.bytes) pin = true;
      }
      pool.add(s, pin);
    }

    report.generations.push_back(
        {gen, report.executions, new_blocks, covered_count, report.catalog.size(), cwj.cw, cwj.ms, best});

    if (report.executions + cfg.population > cfg.max_executions || out_of_time()) break;

    const std::vector<Bytes> pool_bytes = pool.contents();
    testcases.clear();
    origins.assign(cfg.population, SeedOrigin::Mutated);
    for (std::size_t i = 0; i < cfg.population; ++i) {
      const Bytes& parent = pool_bytes[uniform_int<std::size_t>(rng, 0, pool_bytes.size() - 1)];
      testcases.push_back(cwj.ms == Strategy::Slight ? mutate_slight(parent, rng)
                                                     : mutate_heavy(parent, pool_bytes, rng));
    }
  }
  return finish();
}

// ---------------------------------------------------------------------------
// Report files

inline json_util::json report_to_json(const CampaignReport& r, const CampaignConfig& cfg,
                                      const json_util::json& manifest = nullptr) {
  using json = json_util::json;
  json gens = json::array();
  for (const auto& g : r.generations)
    gens.push_back({{"generation", g.generation},
                    {"executions", g.executions},
                    {"new_blocks", g.new_blocks},
                    {"covered_blocks", g.covered_blocks},
                    {"unique_crashes", g.unique_crashes},
                    {"cw", g.cw},
                    {"ms", std::string(to_string(g.ms))},
                    {"best_fitness", g.best_fitness}});
  json crashes = json::array();
  for (const auto& [key, c] : r.catalog)
    crashes.push_back({{"key", key},
                       {"kind", std::string(to_string(c.kind))},
                       {"function", c.site.function},
                       {"block", c.site.block},
                       {"bug_id", c.bug_id ? json(*c.bug_id) : json(nullptr)},
                       {"input_hex", to_hex(c.input)},
                       {"execution", c.execution},
                       {"generation", c.generation}});
  json covered = json::array();
  for (const auto& b : r.covered) covered.push_back({{"function", b.function}, {"block", b.block}});
  json pool = json::array();
  for (const auto& s : r.final_pool)
    pool.push_back({{"input_hex", to_hex(s.bytes)},
                    {"fitness", s.fitness},
                    {"is_crash", s.is_crash},
                    {"origin", std::string(to_string(s.origin))},
                    {"discovered_at", s.discovered_at}});
  json config{{"population", cfg.population},
              {"top_k", cfg.top_k},
              {"pool_capacity", cfg.pool_capacity},
              {"ini_cw", cfg.ini_cw},
              {"min_cw", cfg.min_cw},
              {"max_cw", cfg.max_cw},
              {"cwj_text_mode", cfg.cwj_text_mode},
              {"fitness_mode", std::string(to_string(cfg.mode))},
              {"fitness_dedup_blocks", cfg.fitness_dedup_blocks},
              {"step_limit", cfg.step_limit},
              {"max_executions", cfg.max_executions},
              {"seed", cfg.seed}};
  json j{{"config", std::move(config)},
         {"executions", r.executions},
         {"first_crash_execution", r.first_crash_execution ? json(*r.first_crash_execution) : json(nullptr)},
         {"crashes_found", !r.catalog.empty()},
         {"unique_crashes", r.catalog.size()},
         {"covered_block_count", r.covered.size()},
         {"aborted", r.aborted},
         {"abort_reason", r.abort_reason},
         {"generations", std::move(gens)},
         {"crashes", std::move(crashes)},
         {"covered_blocks", std::move(covered)},
         {"final_pool", std::move(pool)}};
  if (!manifest.is_null()) j["manifest"] = manifest;
  return j;
}

inline std::string report_to_csv(const CampaignReport& r) {
  std::ostringstream out;
  out << "generation,executions,unique_crashes,covered_blocks,cw,ms\n";
  for (const auto& g : r.generations)
    out << g.generation << ',' << g.executions << ',' << g.unique_crashes << ',' << g.covered_blocks << ',' << g.cw
        << ',' << to_string(g.ms) << '\n';
  return out.str();
}

}  // namespace vfuzz
