#pragma once

// Static Vulnerable Scores and path fitness.
//
// Every block of function f scores SVS = kappa * p_f + omega, where p_f is
// the predicted vulnerable probability of f. An input's fitness is the sum
// of SVS over the blocks on its execution path.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "vfuzz/acfg.hpp"
#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"

namespace vfuzz {

inline constexpr double kDefaultKappa = 20.0;
inline constexpr double kDefaultOmega = 0.1;

struct BlockRef {
  std::string function;
  BlockId block = 0;

  auto operator<=>(const BlockRef&) const = default;
  bool operator==(const BlockRef&) const = default;
};

class SvsMap {
 public:
  SvsMap() = default;

  double kappa() const noexcept { return kappa_; }
  double omega() const noexcept { return omega_; }
  const std::map<std::string, double>& probabilities() const noexcept { return p_; }
  const std::map<BlockRef, double>& scores() const noexcept { return scores_; }

  bool contains(const BlockRef& b) const { return scores_.count(b) != 0; }

  double score(const BlockRef& b) const {
    auto it = scores_.find(b);
    if (it == scores_.end())
      throw InvalidArgument("no SVS for block " + std::to_string(b.block) + " of function '" + b.function + "'");
    return it->second;
  }

  std::vector<BlockId> blocks_of(const std::string& function) const {
    std::vector<BlockId> out;
    for (auto it = scores_.lower_bound(BlockRef{function, std::numeric_limits<BlockId>::min()});
         it != scores_.end() && it->first.function == function; ++it)
      out.push_back(it->first.block);
    return out;
  }

 private:
  friend SvsMap assign_svs(const std::map<std::string, double>&, const std::map<std::string, std::vector<BlockId>>&,
                           double, double);

  double kappa_ = kDefaultKappa;
  double omega_ = kDefaultOmega;
  std::map<std::string, double> p_;
  std::map<BlockRef, double> scores_;
};

inline SvsMap assign_svs(const std::map<std::string, double>& predictions,
                         const std::map<std::string, std::vector<BlockId>>& program_blocks,
                         double kappa = kDefaultKappa, double omega = kDefaultOmega) {
  if (!(kappa >= 0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be a finite value >= 0");
  if (!(omega > 0) || !std::isfinite(omega)) throw InvalidArgument("omega must be a finite value > 0");
  SvsMap m;
  m.kappa_ = kappa;
  m.omega_ = omega;
  for (const auto& [fn, blocks] : program_blocks) {
    auto it = predictions.find(fn);
    if (it == predictions.end()) {
      if (blocks.empty()) continue;
      throw InvalidArgument("function '" + fn + "' has no prediction");
    }
    const double p = it->second;
    if (!(p >= 0 && p <= 1)) throw InvalidArgument("prediction for '" + fn + "' is not a probability");
    m.p_[fn] = p;
    const double svs = kappa * p + omega;
    for (BlockId b : blocks) m.scores_[BlockRef{fn, b}] = svs;
  }
  return m;
}

inline std::map<std::string, std::vector<BlockId>> blocks_by_function(const ProgramAcfg& p) {
  std::map<std::string, std::vector<BlockId>> out;
  for (const auto& f : p.functions) {
    auto& v = out[f.function_name];
    for (const auto& b : f.blocks) v.push_back(b.id);
  }
  return out;
}

// Sum of SVS over the path, counting a block once per visit (or once per
// distinct block with `dedup_blocks`).
inline double fitness(const std::vector<BlockRef>& path, const SvsMap& svs, bool dedup_blocks = false) {
  double total = 0;
  if (dedup_blocks) {
    std::map<BlockRef, double> seen;
    for (const auto& b : path) seen.emplace(b, svs.score(b));
    for (const auto& [b, s] : seen) total += s;
    return total;
  }
  for (const auto& b : path) total += svs.score(b);
  return total;
}

// ---------------------------------------------------------------------------
// SVS dump file

inline json_util::json svs_to_json(const SvsMap& m, const json_util::json& manifest = nullptr) {
  json_util::json fns = json_util::json::array();
  for (const auto& [fn, p] : m.probabilities()) {
    json_util::json blocks = json_util::json::array();
    for (BlockId b : m.blocks_of(fn)) blocks.push_back({{"id", b}, {"svs", m.score({fn, b})}});
    fns.push_back({{"name", fn}, {"p", p}, {"blocks", std::move(blocks)}});
  }
  json_util::json j{{"kappa", m.kappa()}, {"omega", m.omega()}, {"functions", std::move(fns)}};
  if (!manifest.is_null()) j["manifest"] = manifest;
  return j;
}

// Rebuilds the map from (kappa, omega, p) and checks each stored score
// against it.
inline SvsMap svs_from_json(const json_util::json& j) {
  using namespace json_util;
  check_keys(j, {"kappa", "omega", "functions"}, {"manifest"}, "");
  const double kappa = get_number(j["kappa"], "/kappa");
  const double omega = get_number(j["omega"], "/omega");
  std::map<std::string, double> preds;
  std::map<std::string, std::vector<BlockId>> blocks;
  std::vector<std::tuple<std::string, BlockId, double, std::string>> stored;
  const auto& fns = get_array(j["functions"], "/functions");
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const std::string w = "/functions/" + std::to_string(i);
    check_keys(fns[i], {"name", "p", "blocks"}, {}, w);
    const std::string name = get_string(fns[i]["name"], w + "/name");
    if (preds.count(name)) throw SchemaError("duplicate function '" + name + "'", w);
    preds[name] = get_number(fns[i]["p"], w + "/p");
    auto& bl = blocks[name];
    const auto& arr = get_array(fns[i]["blocks"], w + "/blocks");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string bw = w + "/blocks/" + std::to_string(k);
      check_keys(arr[k], {"id", "svs"}, {}, bw);
      const BlockId id = get_int(arr[k]["id"], bw + "/id");
      bl.push_back(id);
      stored.emplace_back(name, id, get_number(arr[k]["svs"], bw + "/svs"), bw);
    }
  }
  SvsMap m;
  try {
    m = assign_svs(preds, blocks, kappa, omega);
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what(), "");
  }
  for (const auto& [fn, id, s, where] : stored) {
    const double want = m.score({fn, id});
    if (std::abs(s - want) > 1e-9 * std::max(1.0, std::abs(want)))
      throw SchemaError("svs inconsistent with kappa * p + omega", where);
  }
  return m;
}

}  // namespace vfuzz
