#pragma once

// Attributed control-flow graphs: one directed graph of basic blocks per
// function, each block carrying a fixed-width vector of numeric attributes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vfuzz/error.hpp"
#include "vfuzz/json_util.hpp"

namespace vfuzz {

using BlockId = std::int64_t;

// Operand categories, in attribute-slot order.
enum class OperandKind : std::uint8_t {
  Void = 0,
  Register,
  DirectMemory,
  BaseIndex,
  Displacement,
  Immediate,
  ImmediateFar,
  ImmediateNear,
};
inline constexpr std::size_t kOperandKinds = 8;

// Layout of the default 255-slot block attribute vector.
namespace slots {
inline constexpr std::size_t kInstructionSlots = 244;
inline constexpr std::size_t kOperandSlots = kOperandKinds;
inline constexpr std::size_t kStringSlots = 3;
inline constexpr std::size_t kDefaultDimension = kInstructionSlots + kOperandSlots + kStringSlots;

inline constexpr std::size_t kCall = 0;
inline constexpr std::size_t kOperandBase = kInstructionSlots;
inline constexpr std::size_t kMalloc = kOperandBase + kOperandSlots;
inline constexpr std::size_t kCalloc = kMalloc + 1;
inline constexpr std::size_t kFree = kMalloc + 2;

constexpr std::size_t operand(OperandKind k) { return kOperandBase + static_cast<std::size_t>(k); }
}  // namespace slots

class AttributeSchema {
 public:
  explicit AttributeSchema(std::vector<std::string> names) : names_(std::move(names)) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw InvalidArgument("duplicate attribute name '" + n + "'");
    }
  }

  // 244 instruction-count slots, 8 operand-kind slots, 3 string-count slots.
  static const AttributeSchema& standard() {
    static const AttributeSchema schema = [] {
      std::vector<std::string> names;
      names.reserve(slots::kDefaultDimension);
      names.emplace_back("insn.call");
      for (std::size_t i = 1; i < slots::kInstructionSlots; ++i) {
        std::string n = std::to_string(i);
        names.push_back("insn.op" + std::string(3 - n.size(), '0') + n);
      }
      for (const char* k : {"void", "reg", "mem", "phrase", "displ", "imm", "far", "near"})
        names.push_back(std::string("operand.") + k);
      for (const char* s : {"malloc", "calloc", "free"}) names.push_back(std::string("string.") + s);
      return AttributeSchema(std::move(names));
    }();
    return schema;
  }

  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidArgument("unknown attribute '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
  }

 private:
  std::vector<std::string> names_;
};

struct BasicBlockNode {
  BlockId id = 0;
  std::vector<double> attrs;

  bool operator==(const BasicBlockNode&) const = default;
};

using Edge = std::pair<BlockId, BlockId>;

struct Acfg {
  std::string function_name;
  BlockId entry = 0;
  std::vector<BasicBlockNode> blocks;
  std::vector<Edge> edges;

  bool operator==(const Acfg&) const = default;

  const BasicBlockNode* find_block(BlockId id) const {
    for (const auto& b : blocks)
      if (b.id == id) return &b;
    return nullptr;
  }
};

struct ProgramAcfg {
  std::string program_name;
  std::size_t schema_dim = slots::kDefaultDimension;
  std::vector<Acfg> functions;

  bool operator==(const ProgramAcfg&) const = default;
};

struct Violation {
  std::string code;     // stable short description, e.g. "edge target missing"
  std::string element;  // offending element, e.g. "edge [0,7]"
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;

  bool ok() const noexcept { return violations.empty(); }

  bool has(const std::string& code) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.code == code; });
  }
};

// Checks every structural invariant. Unreachable blocks are reported as
// warnings only.
inline ValidationResult validate(const Acfg& g,
                                 std::size_t dimension = slots::kDefaultDimension) {
  ValidationResult r;
  std::unordered_set<BlockId> ids;
  for (const auto& b : g.blocks) {
    const std::string el = "block " + std::to_string(b.id);
    if (!ids.insert(b.id).second) r.violations.push_back({"duplicate block id", el});
    if (b.attrs.size() != dimension) {
      r.violations.push_back({"attribute width mismatch",
                              el + " has " + std::to_string(b.attrs.size()) + " attributes, expected " +
                                  std::to_string(dimension)});
    }
    for (std::size_t i = 0; i < b.attrs.size(); ++i) {
      const double x = b.attrs[i];
      if (!std::isfinite(x)) {
        r.violations.push_back({"non-finite attribute", el + " slot " + std::to_string(i)});
      } else if (x < 0) {
        r.violations.push_back({"negative attribute", el + " slot " + std::to_string(i)});
      }
    }
  }
  if (!ids.count(g.entry)) r.violations.push_back({"entry missing", "entry " + std::to_string(g.entry)});

  std::set<Edge> seen;
  for (const auto& e : g.edges) {
    const std::string el = "edge [" + std::to_string(e.first) + "," + std::to_string(e.second) + "]";
    if (!ids.count(e.first)) r.violations.push_back({"edge source missing", el});
    if (!ids.count(e.second)) r.violations.push_back({"edge target missing", el});
    if (!seen.insert(e).second) r.violations.push_back({"duplicate edge", el});
  }

  if (ids.count(g.entry)) {
    std::unordered_map<BlockId, std::vector<BlockId>> succ;
    for (const auto& e : g.edges) succ[e.first].push_back(e.second);
    std::unordered_set<BlockId> reached{g.entry};
    std::vector<BlockId> stack{g.entry};
    while (!stack.empty()) {
      BlockId v = stack.back();
      stack.pop_back();
      for (BlockId w : succ[v])
        if (ids.count(w) && reached.insert(w).second) stack.push_back(w);
    }
    for (const auto& b : g.blocks)
      if (!reached.count(b.id)) r.warnings.push_back({"unreachable block", "block " + std::to_string(b.id)});
  }
  return r;
}

inline ValidationResult validate(const ProgramAcfg& p) {
  ValidationResult all;
  std::unordered_set<std::string> names;
  for (const auto& f : p.functions) {
    if (!names.insert(f.function_name).second)
      all.violations.push_back({"duplicate function name", "function " + f.function_name});
    auto r = validate(f, p.schema_dim);
    for (auto& v : r.violations) all.violations.push_back({v.code, f.function_name + ": " + v.element});
    for (auto& v : r.warnings) all.warnings.push_back({v.code, f.function_name + ": " + v.element});
  }
  return all;
}

// The set {u : (u, v) in E}.
inline std::set<BlockId> predecessors(const Acfg& g, BlockId v) {
  if (!g.find_block(v)) throw InvalidArgument("unknown block id " + std::to_string(v));
  std::set<BlockId> out;
  for (const auto& [from, to] : g.edges)
    if (to == v) out.insert(from);
  return out;
}

// Predecessor lists keyed by position in `g.blocks`. Requires a valid graph.
inline std::vector<std::vector<std::size_t>> predecessor_indices(const Acfg& g) {
  std::unordered_map<BlockId, std::size_t> index;
  for (std::size_t i = 0; i < g.blocks.size(); ++i) index.emplace(g.blocks[i].id, i);
  std::vector<std::vector<std::size_t>> preds(g.blocks.size());
  for (const auto& [from, to] : g.edges) {
    auto f = index.find(from);
    auto t = index.find(to);
    if (f == index.end() || t == index.end()) throw InvalidArgument("edge endpoint missing");
    preds[t->second].push_back(f->second);
  }
  return preds;
}

// ---------------------------------------------------------------------------
// JSON document format

inline json_util::json to_json(const Acfg& g) {
  json_util::json blocks = json_util::json::array();
  for (const auto& b : g.blocks) blocks.push_back({{"id", b.id}, {"attrs", b.attrs}});
  json_util::json edges = json_util::json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  return {{"name", g.function_name}, {"entry", g.entry}, {"blocks", std::move(blocks)},
          {"edges", std::move(edges)}};
}

// Reads one function object. Structural invariants are checked here so a
// document that parses always yields valid graphs.
inline Acfg acfg_from_json(const json_util::json& j, std::size_t dimension, const std::string& where) {
  using namespace json_util;
  check_keys(j, {"name", "entry", "blocks", "edges"}, {}, where);
  Acfg g;
  g.function_name = get_string(j["name"], where + "/name");
  g.entry = get_int(j["entry"], where + "/entry");
  const auto& blocks = get_array(j["blocks"], where + "/blocks");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string bw = where + "/blocks/" + std::to_string(i);
    check_keys(blocks[i], {"id", "attrs"}, {}, bw);
    BasicBlockNode node;
    node.id = get_int(blocks[i]["id"], bw + "/id");
    const auto& attrs = get_array(blocks[i]["attrs"], bw + "/attrs");
    if (attrs.size() != dimension) {
      throw SchemaError("attribute width mismatch: " + std::to_string(attrs.size()) + " != " +
                            std::to_string(dimension),
                        bw + "/attrs");
    }
    node.attrs.reserve(attrs.size());
    for (std::size_t k = 0; k < attrs.size(); ++k)
      node.attrs.push_back(get_number(attrs[k], bw + "/attrs/" + std::to_string(k)));
    g.blocks.push_back(std::move(node));
  }
  const auto& edges = get_array(j["edges"], where + "/edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ew = where + "/edges/" + std::to_string(i);
    if (!edges[i].is_array() || edges[i].size() != 2) throw SchemaError("edge must be [from, to]", ew);
    g.edges.emplace_back(get_int(edges[i][0], ew + "/0"), get_int(edges[i][1], ew + "/1"));
  }
  auto r = validate(g, dimension);
  if (!r.ok()) throw SchemaError(r.violations.front().code + " (" + r.violations.front().element + ")", where);
  return g;
}

inline json_util::json to_json(const ProgramAcfg& p) {
  json_util::json fns = json_util::json::array();
  for (const auto& f : p.functions) fns.push_back(to_json(f));
  return {{"program", p.program_name}, {"schema_dim", p.schema_dim}, {"functions", std::move(fns)}};
}

inline ProgramAcfg program_acfg_from_json(const json_util::json& j) {
  using namespace json_util;
  check_keys(j, {"program", "schema_dim", "functions"}, {}, "");
  ProgramAcfg p;
  p.program_name = get_string(j["program"], "/program");
  const long long dim = get_int(j["schema_dim"], "/schema_dim");
  if (dim < 1) throw SchemaError("schema_dim must be positive", "/schema_dim");
  p.schema_dim = static_cast<std::size_t>(dim);
  const auto& fns = get_array(j["functions"], "/functions");
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const std::string where = "/functions/" + std::to_string(i);
    p.functions.push_back(acfg_from_json(fns[i], p.schema_dim, where));
    if (!names.insert(p.functions.back().function_name).second)
      throw SchemaError("duplicate function name '" + p.functions.back().function_name + "'", where);
  }
  return p;
}

inline std::string serialize(const ProgramAcfg& p) {
  auto r = validate(p);
  if (!r.ok()) throw InvalidArgument("cannot serialize invalid ACFG: " + r.violations.front().code);
  return to_json(p).dump();
}

inline ProgramAcfg parse_program_acfg(std::string_view text) {
  return program_acfg_from_json(json_util::parse(text));
}

}  // namespace vfuzz
