#pragma once

// Synthetic labeled ACFG corpora with a tunable class signal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vfuzz/acfg.hpp"
#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"
#include "vfuzz/rng.hpp"

namespace vfuzz {

enum Label : int { kVulnerable = 0, kSecure = 1 };

struct LabeledGraph {
  Acfg graph;
  int label = kSecure;

  bool operator==(const LabeledGraph&) const = default;
};

using Corpus = std::vector<LabeledGraph>;

struct SynthSpec {
  std::size_t per_class = 1000;
  std::size_t min_blocks = 3;
  std::size_t max_blocks = 12;
  double min_density = 0.0;
  double max_density = 0.25;
  // 0: classes identically distributed; 1: per-graph means of the signal
  // slots are disjoint between classes.
  double signal_strength = 1.0;
  std::uint64_t seed = 0;

  void check() const {
    if (min_blocks < 1 || min_blocks > max_blocks) throw InvalidArgument("block-count range is empty");
    if (!(min_density >= 0 && min_density <= max_density && max_density <= 1))
      throw InvalidArgument("edge-density range must satisfy 0 <= min <= max <= 1");
    if (!(signal_strength >= 0 && signal_strength <= 1))
      throw InvalidArgument("signal_strength must lie in [0, 1]");
  }
};

// Slots whose counts are shifted upward in vulnerable graphs.
inline const std::vector<std::size_t>& signal_slots() {
  static const std::vector<std::size_t> s{slots::kCall, slots::kMalloc, slots::kCalloc, slots::kFree,
                                          slots::operand(OperandKind::Immediate)};
  return s;
}

namespace detail {

// Base counts are uniform on {0,1,2}; the vulnerable class adds 3*s, split
// into an integer part plus a Bernoulli draw for the fraction.
inline constexpr int kSignalBaseMax = 2;
inline constexpr double kSignalShift = 3.0;

inline Acfg synth_graph(Rng& rng, const SynthSpec& spec, int label, std::string name) {
  Acfg g;
  g.function_name = std::move(name);
  const auto n = uniform_int<std::size_t>(rng, spec.min_blocks, spec.max_blocks);
  const double density = uniform_real(rng, spec.min_density, spec.max_density);

  std::set<Edge> edges;
  for (std::size_t v = 1; v < n; ++v)
    edges.emplace(static_cast<BlockId>(uniform_int<std::size_t>(rng, 0, v - 1)), static_cast<BlockId>(v));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      const double p = u == v ? density / 2 : density;
      if (bernoulli(rng, p)) edges.emplace(static_cast<BlockId>(u), static_cast<BlockId>(v));
    }
  }
  g.edges.assign(edges.begin(), edges.end());
  g.entry = 0;

  const double shift = kSignalShift * spec.signal_strength;
  const double whole = std::floor(shift);
  const double frac = shift - whole;
  for (std::size_t v = 0; v < n; ++v) {
    BasicBlockNode b;
    b.id = static_cast<BlockId>(v);
    b.attrs.assign(slots::kDefaultDimension, 0.0);
    const int noisy = uniform_int(rng, 1, 6);
    for (int k = 0; k < noisy; ++k) b.attrs[uniform_int<std::size_t>(rng, 1, 40)] += uniform_int(rng, 1, 3);
    b.attrs[slots::operand(OperandKind::Void)] = uniform_int(rng, 0, 1);
    for (auto kind : {OperandKind::Register, OperandKind::DirectMemory, OperandKind::BaseIndex,
                      OperandKind::Displacement})
      b.attrs[slots::operand(kind)] = uniform_int(rng, 0, 4);
    b.attrs[slots::operand(OperandKind::ImmediateNear)] = uniform_int(rng, 0, 1);
    for (std::size_t slot : signal_slots()) {
      double count = uniform_int(rng, 0, kSignalBaseMax);
      const bool extra = bernoulli(rng, frac);
      if (label == kVulnerable) count += whole + (extra ? 1.0 : 0.0);
      b.attrs[slot] = count;
    }
    g.blocks.push_back(std::move(b));
  }
  return g;
}

}  // namespace detail

// Emits 2*per_class graphs with labels alternating vulnerable, secure, ...
// Graph k draws from its own stream derived from (seed, k).
inline Corpus generate(const SynthSpec& spec) {
  spec.check();
  Corpus out;
  out.reserve(2 * spec.per_class);
  for (std::size_t k = 0; k < 2 * spec.per_class; ++k) {
    Rng rng = make_rng(spec.seed, k);
    const int label = k % 2 == 0 ? kVulnerable : kSecure;
    out.push_back({detail::synth_graph(rng, spec, label, "fn_" + std::to_string(k)), label});
  }
  return out;
}

// Class-stratified split. Each class contributes round(n_c * fraction)
// graphs to the training half; original order is kept inside each half.
inline std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1)) throw InvalidArgument("train_fraction must lie in (0, 1)");
  if (corpus.size() < 2) throw InvalidArgument("corpus too small to stratify");
  std::vector<bool> in_train(corpus.size(), false);
  for (int label : {kVulnerable, kSecure}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (corpus[i].label == label) idx.push_back(i);
    if (idx.empty()) continue;
    const auto take = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * train_fraction));
    if (take == 0 || take == idx.size()) throw InvalidArgument("corpus too small to stratify");
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(label));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < take; ++i) in_train[idx[i]] = true;
  }
  std::pair<Corpus, Corpus> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) (in_train[i] ? out.first : out.second).push_back(corpus[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Newline-delimited JSON corpus files

inline std::string corpus_to_ndjson(const Corpus& corpus) {
  std::string out;
  for (const auto& item : corpus) {
    json_util::json rec{{"label", item.label}, {"graph", to_json(item.graph)}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

inline Corpus corpus_from_ndjson(std::string_view text, std::size_t dimension = slots::kDefaultDimension,
                                 const std::string& source = "<corpus>") {
  Corpus out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto j = json_util::parse(line, where);
    json_util::check_keys(j, {"label", "graph"}, {}, where);
    const long long label = json_util::get_int(j["label"], where + " /label");
    if (label != kVulnerable && label != kSecure) throw SchemaError("label must be 0 or 1", where + " /label");
    out.push_back({acfg_from_json(j["graph"], dimension, where + " /graph"), static_cast<int>(label)});
  }
  return out;
}

}  // namespace vfuzz
